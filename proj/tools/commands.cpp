#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sigjoin/bench.hpp"
#include "sigjoin/cost_model.hpp"
#include "sigjoin/generator.hpp"
#include "sigjoin/join.hpp"
#include "sigjoin/relation.hpp"

namespace sigjoin::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kSeedEnv = "SIGJOIN_SEED";

/// Invalid flag values found after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv)) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string_view(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string(kSeedEnv) + "='" + env + "' is not an unsigned integer");
  }
  return 1;
}

fs::path schema_path_for(const fs::path& csv) {
  auto p = csv;
  return p.replace_extension(".schema");
}

struct GenOptions {
  std::size_t rows_r = 10000;
  std::size_t rows_s = 20000;
  std::size_t attr_len = 100;
  std::optional<double> selectivity;
  std::size_t row_bytes = 128;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

struct JoinOptions {
  std::string r_path, s_path, r_schema, s_schema;
  std::string left_key, right_key;
  std::string algo = "sig-hash";
  std::string mode = "verify";
  std::size_t partitions = 8;
  unsigned f = 16;
  unsigned n_sig = 2;
  std::string out_path = "-";
  bool materialize = false;
};

struct BenchOptions {
  std::size_t rows_r = 10000;
  std::size_t rows_s = 20000;
  std::vector<std::size_t> attr_lens{2, 7, 10, 50, 100};
  std::size_t repetitions = 5;
  std::size_t warmups = 1;
  std::optional<double> selectivity;
  std::size_t row_bytes = 128;
  std::optional<std::uint64_t> seed;
  bool trust = false;
  unsigned f = 16;
  unsigned n_sig = 2;
  std::string out_path = "-";
};

struct CostOptions {
  std::string config;
  std::string sweep;
  double from = 0, to = 0, step = 1;
  std::string format = "csv";
};

/// Writes to `path`, or to `fallback` when path is "-".
template <typename Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path == "-") {
    fn(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  fn(static_cast<std::ostream&>(file));
  if (!file) throw std::runtime_error("write failed for " + path);
}

int cmd_gen(const GenOptions& o, std::ostream& out) {
  GenSpec spec;
  spec.card_r = o.rows_r;
  spec.card_s = o.rows_s;
  spec.attr_len = o.attr_len;
  spec.selectivity = o.selectivity.value_or(GenSpec::default_selectivity(o.rows_r, o.rows_s));
  spec.row_bytes = o.row_bytes;
  spec.seed = resolve_seed(o.seed);
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto pair = generate_pair(spec);
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  save_csv(dir / "R.csv", pair.r);
  save_csv(dir / "S.csv", pair.s);
  save_schema(dir / "R.schema", pair.r.schema());
  save_schema(dir / "S.schema", pair.s.schema());
  out << "rows_r=" << spec.card_r << " rows_s=" << spec.card_s << " attr_len=" << spec.attr_len
      << " selectivity=" << spec.selectivity << " seed=" << spec.seed << " planted_matches=" << pair.planted_matches
      << '\n';
  return kExitOk;
}

void write_stats(std::ostream& err, const JoinSpec& spec, const JoinResult& result) {
  const auto& st = result.stats;
  err << "algo=" << to_string(spec.algorithm);
  if (uses_signatures(spec.algorithm)) err << " mode=" << to_string(spec.mode);
  err << " pairs=" << result.pairs.size() << " build_ms=" << st.build_ns / 1e6 << " probe_ms=" << st.probe_ns / 1e6
      << " peak_table_bytes=" << st.peak_table_bytes << " probes=" << st.probes
      << " signature_matches=" << st.signature_matches << " verified_matches="
      << (st.verified_matches ? std::to_string(*st.verified_matches) : "n/a")
      << " collisions=" << (st.collisions ? std::to_string(*st.collisions) : "n/a") << '\n';
}

int cmd_join(const JoinOptions& o, std::ostream& out, std::ostream& err) {
  JoinSpec spec;
  const auto algo = parse_join_algorithm(o.algo);
  if (!algo) throw UsageError("unknown --algo '" + o.algo + "'");
  const auto mode = parse_sig_mode(o.mode);
  if (!mode) throw UsageError("unknown --mode '" + o.mode + "'");
  if (o.partitions < 1) throw UsageError("--partitions must be at least 1");
  spec.algorithm = *algo;
  spec.mode = *mode;
  spec.partitions = o.partitions;
  spec.sig_config = {o.f, o.n_sig};
  if (uses_signatures(spec.algorithm)) {
    try {
      SignatureBase check(spec.sig_config);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }

  const auto r_schema = load_schema(o.r_schema.empty() ? schema_path_for(o.r_path) : fs::path(o.r_schema));
  const auto s_schema = load_schema(o.s_schema.empty() ? schema_path_for(o.s_path) : fs::path(o.s_schema));
  const auto r = load_csv(o.r_path, r_schema);
  const auto s = load_csv(o.s_path, s_schema);
  spec.left_key = o.left_key.empty() ? r_schema.key_column() : o.left_key;
  spec.right_key = o.right_key.empty() ? s_schema.key_column() : o.right_key;

  const auto result = run_join(r, s, spec);

  with_output(o.out_path, out, [&](std::ostream& os) {
    if (!o.materialize) {
      os << "r_row,s_row\n";
      for (const auto& [i, j] : result.pairs) os << i << ',' << j << '\n';
      return;
    }
    std::vector<Column> columns;
    for (const auto& c : r.schema().columns()) columns.push_back({"r." + c.name, c.type});
    for (const auto& c : s.schema().columns()) columns.push_back({"s." + c.name, c.type});
    Relation joined(Schema(std::move(columns), "r." + spec.left_key));
    for (const auto& [i, j] : result.pairs) {
      Tuple row = r.row(i);
      const auto right = s.row(j);
      row.insert(row.end(), right.begin(), right.end());
      joined.append(std::move(row));
    }
    emit_csv(os, joined);
  });
  write_stats(err, spec, result);
  return kExitOk;
}

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  bench::BenchConfig config;
  config.gen.card_r = o.rows_r;
  config.gen.card_s = o.rows_s;
  config.gen.selectivity = o.selectivity.value_or(GenSpec::default_selectivity(o.rows_r, o.rows_s));
  config.gen.row_bytes = o.row_bytes;
  config.gen.seed = resolve_seed(o.seed);
  config.attr_lens = o.attr_lens;
  config.repetitions = o.repetitions;
  config.warmups = o.warmups;
  config.mode = o.trust ? SigMode::Trust : SigMode::Verify;
  config.sig_config = {o.f, o.n_sig};
  try {
    config.validate();
    SignatureBase check(config.sig_config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const GfError& e) {
    throw UsageError(e.what());
  }
  if (o.repetitions < 3) err << "warning: fewer than 3 repetitions; medians are not publishable\n";

  with_output(o.out_path, out, [&](std::ostream& os) {
    bench::emit_csv_header(os);
    // one length at a time so partial results appear as the sweep runs
    for (auto len : config.attr_lens) {
      auto single = config;
      single.attr_lens = {len};
      for (const auto& rec : bench::run_bench(single)) bench::emit_csv_row(os, rec);
      os.flush();
    }
  });
  return kExitOk;
}

int cmd_cost(const CostOptions& o, std::ostream& out) {
  cost::CostParams params = o.config.empty() ? cost::CostParams::default_profile()
                                             : cost::load_params(o.config, cost::CostParams::default_profile());
  if (o.format != "csv" && o.format != "text") throw UsageError("--format must be csv or text");
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("cost config: ") + e.what());
  }

  if (o.sweep.empty()) {
    const auto breakdown = cost::evaluate(params);
    if (o.format == "csv") {
      cost::emit_breakdown_csv(out, breakdown);
    } else {
      cost::emit_breakdown_text(out, params, breakdown);
    }
    return kExitOk;
  }

  const auto& names = cost::CostParams::names();
  if (std::find(names.begin(), names.end(), o.sweep) == names.end()) {
    throw UsageError("unknown --sweep parameter '" + o.sweep + "'");
  }
  if (!(o.step > 0) || o.to < o.from) throw UsageError("--sweep needs --from <= --to and --step > 0");
  out << o.sweep;
  for (const auto& [name, value] : cost::CostBreakdown{}.components()) out << ',' << name;
  out << '\n';
  const auto steps = static_cast<std::size_t>(std::floor((o.to - o.from) / o.step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double v = o.from + static_cast<double>(i) * o.step;
    params.set(o.sweep, v);
    cost::CostBreakdown breakdown;
    try {
      breakdown = cost::evaluate(params);
    } catch (const std::invalid_argument& e) {
      throw UsageError("sweep value " + std::to_string(v) + ": " + e.what());
    }
    out << v;
    for (const auto& [name, value] : breakdown.components()) out << ',' << value;
    out << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equi-join engine with algebraic-signature keys, benchmark driver and cost model", "sigjoin"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic R/S pair as CSV plus schema sidecars");
  gen_cmd->add_option("--rows-r", gen.rows_r, "Rows in R (build side)")->capture_default_str();
  gen_cmd->add_option("--rows-s", gen.rows_s, "Rows in S (probe side)")->capture_default_str();
  gen_cmd->add_option("--attr-len", gen.attr_len, "Join key length in bytes")->capture_default_str();
  gen_cmd->add_option("--selectivity", gen.selectivity, "Join selectivity (default 1.5/max(rows_r, rows_s))");
  gen_cmd->add_option("--row-bytes", gen.row_bytes, "Approximate row width")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, std::string("Generator seed (default $") + kSeedEnv + " or 1)");
  gen_cmd->add_option("--out-dir", gen.out_dir, "Directory for R.csv, S.csv, R.schema, S.schema")
      ->capture_default_str();

  JoinOptions join;
  auto* join_cmd = app.add_subcommand("join", "Join two CSV relations");
  join_cmd->add_option("--r", join.r_path, "Build-side CSV")->required();
  join_cmd->add_option("--s", join.s_path, "Probe-side CSV")->required();
  join_cmd->add_option("--r-schema", join.r_schema, "Schema sidecar for R (default: R path with .schema)");
  join_cmd->add_option("--s-schema", join.s_schema, "Schema sidecar for S (default: S path with .schema)");
  join_cmd->add_option("--left-key", join.left_key, "Join column of R (default: schema key)");
  join_cmd->add_option("--right-key", join.right_key, "Join column of S (default: schema key)");
  join_cmd->add_option("--algo", join.algo, "nested-loop | hash | sig-hash | grace | grace-sig")->capture_default_str();
  join_cmd->add_option("--mode", join.mode, "verify | trust (signature algorithms)")->capture_default_str();
  join_cmd->add_option("--partitions", join.partitions, "Grace partition count")->capture_default_str();
  join_cmd->add_option("--f", join.f, "Signature field width (8 or 16)")->capture_default_str();
  join_cmd->add_option("--nsig", join.n_sig, "Signature symbol count")->capture_default_str();
  join_cmd->add_option("--out", join.out_path, "Output CSV ('-' for stdout)")->capture_default_str();
  join_cmd->add_flag("--materialize", join.materialize, "Write joined tuples instead of row-index pairs");

  BenchOptions bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "Sweep key lengths, timing baseline vs signature hash join");
  bench_cmd->add_option("--rows-r", bench_opts.rows_r, "Rows in R")->capture_default_str();
  bench_cmd->add_option("--rows-s", bench_opts.rows_s, "Rows in S")->capture_default_str();
  bench_cmd->add_option("--attr-lens", bench_opts.attr_lens, "Comma-separated key lengths")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--reps", bench_opts.repetitions, "Timed repetitions")->capture_default_str();
  bench_cmd->add_option("--warmups", bench_opts.warmups, "Untimed warmup runs")->capture_default_str();
  bench_cmd->add_option("--selectivity", bench_opts.selectivity, "Join selectivity (default 1.5/max)");
  bench_cmd->add_option("--row-bytes", bench_opts.row_bytes, "Approximate row width")->capture_default_str();
  bench_cmd->add_option("--seed", bench_opts.seed, std::string("Generator seed (default $") + kSeedEnv + " or 1)");
  bench_cmd->add_flag("--trust", bench_opts.trust, "Time signature joins in trust mode");
  bench_cmd->add_option("--f", bench_opts.f, "Signature field width")->capture_default_str();
  bench_cmd->add_option("--nsig", bench_opts.n_sig, "Signature symbol count")->capture_default_str();
  bench_cmd->add_option("--out", bench_opts.out_path, "Output CSV ('-' for stdout)")->capture_default_str();

  CostOptions cost_opts;
  auto* cost_cmd = app.add_subcommand("cost", "Evaluate the analytic join cost model");
  cost_cmd->add_option("--config", cost_opts.config, "key=value parameter file (default: built-in profile)");
  cost_cmd->add_option("--sweep", cost_opts.sweep, "Parameter to sweep");
  cost_cmd->add_option("--from", cost_opts.from, "Sweep start");
  cost_cmd->add_option("--to", cost_opts.to, "Sweep end (inclusive)");
  cost_cmd->add_option("--step", cost_opts.step, "Sweep step")->capture_default_str();
  cost_cmd->add_option("--format", cost_opts.format, "csv | text (single evaluation)")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, out);
    if (join_cmd->parsed()) return cmd_join(join, out, err);
    if (bench_cmd->parsed()) return cmd_bench(bench_opts, out, err);
    if (cost_cmd->parsed()) return cmd_cost(cost_opts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace sigjoin::cli
