#include "dgrl/csv.hpp"

#include "dgrl/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace dgrl {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("not a number: '" + text + "'");
  }
  return v;
}

std::string format_metrics(const std::vector<MetricsRecord>& records, bool include_timing) {
  std::string out = kMetricsHeader;
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.episode);
    out += ',';
    out += format_double(r.train_return);
    out += ',';
    if (r.eval_return) out += format_double(*r.eval_return);
    out += ',';
    if (include_timing) out += format_double(r.wall_time_ms_per_step);
    out += ',';
    out += format_double(r.actor_loss);
    out += ',';
    out += format_double(r.critic_loss);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<MetricsRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << format_metrics(records);
  if (!out) throw FormatError("failed writing " + path);
}

std::vector<MetricsRecord> parse_metrics(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) throw FormatError("missing metrics header");
  std::vector<MetricsRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 6) throw FormatError("line " + std::to_string(line_no) + ": expected 6 fields");
    try {
      MetricsRecord r;
      r.episode = std::stoi(f[0]);
      r.train_return = parse_double(f[1]);
      if (!f[2].empty()) r.eval_return = parse_double(f[2]);
      r.wall_time_ms_per_step = f[3].empty() ? 0.0 : parse_double(f[3]);
      r.actor_loss = parse_double(f[4]);
      r.critic_loss = parse_double(f[5]);
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw FormatError("line " + std::to_string(line_no) + ": bad episode index");
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<MetricsRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return parse_metrics(in);
}

}  // namespace dgrl
