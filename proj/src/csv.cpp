// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "covert/harness.hpp"

namespace covert {

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, ptr);
}

std::string to_csv(std::span<const MetricsRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.scenario;
    out += ',';
    out += to_string(r.signal_type);
    out += ',';
    out += format_number(r.snr_db);
    out += ',';
    out += format_number(r.pnr_db);
    out += ',';
    out += to_string(r.jammer);
    out += ',';
    out += format_number(r.covertness_rate);
    out += ',';
    out += format_number(r.ber);
    out += ',';
    out += format_number(r.attack_success_rate);
    out += ',';
    out += format_number(r.mean_epsilon);
    out += ',';
    out += std::to_string(r.n_trials);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

void emit_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  const std::string text = to_csv(rows);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

namespace {

template <typename T>
T parse_field(std::string_view field, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::invalid_argument("csv line " + std::to_string(line) + ": bad numeric field '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::vector<MetricsRow> parse_csv(std::string_view text) {
  std::vector<MetricsRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kCsvHeader) throw std::invalid_argument("csv: unexpected header '" + std::string(line) + "'");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t p = 0;
    while (true) {
      const auto comma = line.find(',', p);
      f.push_back(line.substr(p, comma == std::string_view::npos ? std::string_view::npos : comma - p));
      if (comma == std::string_view::npos) break;
      p = comma + 1;
    }
    if (f.size() != 11) {
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 11 fields, got " +
                                  std::to_string(f.size()));
    }
    MetricsRow r;
    r.scenario = std::string(f[0]);
    r.signal_type = parse_signal_type(f[1]);
    r.snr_db = parse_field<double>(f[2], line_no);
    r.pnr_db = parse_field<double>(f[3], line_no);
    r.jammer = parse_jammer(f[4]);
    r.covertness_rate = parse_field<double>(f[5], line_no);
    r.ber = parse_field<double>(f[6], line_no);
    r.attack_success_rate = parse_field<double>(f[7], line_no);
    r.mean_epsilon = parse_field<double>(f[8], line_no);
    r.n_trials = parse_field<std::size_t>(f[9], line_no);
    r.seed = parse_field<std::uint64_t>(f[10], line_no);
    rows.push_back(std::move(r));
  }
  if (line_no == 0) throw std::invalid_argument("csv: missing header");
  return rows;
}

std::vector<MetricsRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace covert
