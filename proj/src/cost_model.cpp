#include "sigjoin/cost_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "sigjoin/relation.hpp"

namespace sigjoin::cost {

namespace {

struct Field {
  std::string_view name;
  double CostParams::*member;
};

constexpr Field kFields[] = {
    {"b", &CostParams::b},
    {"k", &CostParams::k},
    {"r_area", &CostParams::r_area},
    {"m", &CostParams::m},
    {"n", &CostParams::n},
    {"loop_factor", &CostParams::loop_factor},
    {"disk_input_r", &CostParams::disk_input_r},
    {"hash_bucket", &CostParams::hash_bucket},
    {"disk_output_buckets", &CostParams::disk_output_buckets},
    {"read_bucket", &CostParams::read_bucket},
    {"signature_generating", &CostParams::signature_generating},
    {"build_sign_cost", &CostParams::build_sign_cost},
    {"write_hsign_to_disk", &CostParams::write_hsign_to_disk},
    {"disk_input_s", &CostParams::disk_input_s},
    {"signature_calculation", &CostParams::signature_calculation},
    {"probe_sign_cost", &CostParams::probe_sign_cost},
    {"disk_input_tuples_result", &CostParams::disk_input_tuples_result},
    {"materialize_t", &CostParams::materialize_t},
};

const Field* find_field(std::string_view name) {
  for (const auto& f : kFields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

}  // namespace

void CostParams::validate() const {
  for (const auto& f : kFields) {
    const double v = this->*f.member;
    if (!std::isfinite(v) || v < 0) throw std::invalid_argument(std::string(f.name) + " must be a finite value >= 0");
  }
  if (b < 1) throw std::invalid_argument("b must be at least 1");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (r_area > b) throw std::invalid_argument("r_area must not exceed b");
  if (loop_factor < 1) throw std::invalid_argument("loop_factor must be at least 1");
}

const std::vector<std::string_view>& CostParams::names() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> out;
    for (const auto& f : kFields) out.push_back(f.name);
    return out;
  }();
  return names;
}

bool CostParams::set(std::string_view name, double value) {
  const Field* f = find_field(name);
  if (!f) return false;
  this->*f->member = value;
  return true;
}

double CostParams::get(std::string_view name) const {
  const Field* f = find_field(name);
  if (!f) throw std::invalid_argument("unknown cost parameter '" + std::string(name) + "'");
  return this->*f->member;
}

CostParams CostParams::default_profile() {
  CostParams p;
  // 10000 x 20000 rows, 32 rows per 4 KB page
  p.m = 10000;
  p.n = 20000;
  p.b = 625;
  p.k = 64;
  p.r_area = 0;
  p.loop_factor = 1;
  // 0.1 ms per sequential page read, spread over 32 tuples
  const double tuple_io = 0.1 / 32;
  p.disk_input_r = tuple_io;
  p.disk_output_buckets = tuple_io;
  p.read_bucket = tuple_io;
  p.disk_input_s = tuple_io;
  p.disk_input_tuples_result = 15000 * tuple_io;
  p.materialize_t = 15000 * tuple_io;
  p.hash_bucket = 0.0001;
  // 25 ms per MB over a 100-byte join key
  p.signature_generating = 25.0 * 100 / (1 << 20);
  p.signature_calculation = p.signature_generating;
  p.build_sign_cost = 0.0001;
  p.probe_sign_cost = 0.0001;
  p.write_hsign_to_disk = 0;
  return p;
}

std::vector<std::pair<std::string_view, double>> CostBreakdown::components() const {
  return {{"memory_needed_pages", memory_needed_pages},
          {"disk_ios", disk_ios},
          {"build_buckets", build_buckets},
          {"build_hash", build_hash},
          {"probe_hash", probe_hash},
          {"output_result", output_result},
          {"total", total},
          {"grace_temp_ios", grace_temp_ios}};
}

double memory_needed(double b, double k) {
  if (b < 1 || k < 1) throw std::invalid_argument("memory_needed requires b >= 1 and k >= 1");
  return std::max(std::ceil(b / k), k);
}

double disk_ios(double b, double r_area) {
  if (r_area < 0 || r_area > b) throw std::invalid_argument("disk_ios requires 0 <= r_area <= b");
  return 2 * b + 4 * (b - r_area);
}

CostBreakdown evaluate(const CostParams& p) {
  p.validate();
  CostBreakdown out;
  out.memory_needed_pages = memory_needed(p.b, p.k);
  out.disk_ios = disk_ios(p.b, p.r_area);
  out.grace_temp_ios = 4 * (p.b - p.r_area);
  out.build_buckets = (p.m * p.loop_factor + p.n * p.loop_factor) *
                      (p.disk_input_r + p.hash_bucket + p.disk_output_buckets);
  out.build_hash = p.m * (p.read_bucket + p.signature_generating + p.build_sign_cost) + p.write_hsign_to_disk;
  out.probe_hash = p.n * (p.disk_input_s + p.signature_calculation + p.probe_sign_cost);
  out.output_result = p.disk_input_tuples_result + p.materialize_t;
  out.total = out.memory_needed_pages + out.disk_ios + out.build_buckets + out.build_hash + out.probe_hash +
              out.output_result;
  return out;
}

CostParams parse_params(std::istream& in, CostParams base) {
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto text = trim(raw);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = trim(text.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("cost config line " + std::to_string(line) + ": expected key=value");
    }
    const auto name = trim(text.substr(0, eq));
    const auto value_text = trim(text.substr(eq + 1));
    double value = 0;
    const auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (value_text.empty() || ec != std::errc() || ptr != value_text.data() + value_text.size()) {
      throw DataError("cost config line " + std::to_string(line) + ": '" + std::string(value_text) +
                      "' is not a number");
    }
    if (!base.set(name, value)) {
      throw DataError("cost config line " + std::to_string(line) + ": unknown parameter '" + std::string(name) + "'");
    }
  }
  return base;
}

CostParams load_params(const std::filesystem::path& path, CostParams base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_params(in, base);
}

void emit_breakdown_csv(std::ostream& out, const CostBreakdown& breakdown) {
  out << "component,value\n";
  for (const auto& [name, value] : breakdown.components()) out << name << ',' << value << '\n';
}

void emit_breakdown_text(std::ostream& out, const CostParams& params, const CostBreakdown& breakdown) {
  out << "signature hash join cost (b=" << params.b << ", k=" << params.k << ", r_area=" << params.r_area
      << ", m=" << params.m << ", n=" << params.n << ", L_f=" << params.loop_factor << ")\n";
  for (const auto& [name, value] : breakdown.components()) {
    out << "  " << name << std::string(22 - std::min<std::size_t>(name.size(), 21), ' ') << value << '\n';
  }
  out << "  (total mixes pages, I/O counts and unit-cost terms; weigh components as needed)\n";
}

}  // namespace sigjoin::cost
