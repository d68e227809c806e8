// rpca: randomized low-rank SVD from the command line.
//
//   rpca approx  INPUT --k 10 [--l --i --variant --seed --certify --out DIR]
//   rpca verify  INPUT --out DIR
//   rpca bench   TABLE [--cap 4096 --out DIR]
//   rpca bound   --m 512 --k 10 [--l --i --beta --gamma --sweep-i N --j J]
//   rpca spectrum --m 512 [--sigma 0.001]
//
// Exit codes: 0 ok, 1 verification mismatch, 2 I/O, 3 parse, 4 contract, 5 numerical.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rpca/rpca.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kMismatch = 1, kIo = 2, kParse = 3, kContract = 4, kNumerical = 5 };

struct InputSpec {
  std::string path;
  std::string format;  // "mtx", "bin", or empty to infer from the extension
  std::vector<std::string> testgen;
};

struct Loaded {
  std::unique_ptr<rpca::LinearOperator> op;
  std::string description;
};

// --testgen m=512 sigma=0.001 [k=10]
rpca::testgen::SpectrumSpec parse_testgen(const std::vector<std::string>& tokens) {
  rpca::testgen::SpectrumSpec spec;
  for (const auto& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw rpca::ContractViolation("--testgen: expected key=value, got '" + tok + "'");
    const auto key = tok.substr(0, eq);
    const auto value = tok.substr(eq + 1);
    try {
      if (key == "m") spec.m = std::stoll(value);
      else if (key == "sigma") spec.sigma_k1 = std::stod(value);
      else if (key == "k") spec.k = std::stoll(value);
      else throw rpca::ContractViolation("--testgen: unknown key '" + key + "'");
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const rpca::ContractViolation*>(&e)) throw;
      throw rpca::ContractViolation("--testgen: bad value for '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

Loaded load_input(const InputSpec& in) {
  if (!in.testgen.empty()) {
    const auto spec = parse_testgen(in.testgen);
    std::ostringstream os;
    os << "testgen m=" << spec.m << " sigma=" << spec.sigma_k1 << " k=" << spec.k;
    return {std::make_unique<rpca::HadamardSpectrumOperator>(rpca::testgen::build_test_operator(spec)), os.str()};
  }
  if (in.path.empty()) throw rpca::ContractViolation("no input: give a matrix file or --testgen");
  std::string format = in.format;
  if (format.empty()) format = fs::path(in.path).extension() == ".mtx" ? "mtx" : "bin";
  const auto f = format == "mtx" ? rpca::io::Format::matrix_market : rpca::io::Format::rpca_binary;
  return {rpca::io::load_operator(in.path, f), in.path};
}

void add_input_options(CLI::App* cmd, InputSpec& in) {
  cmd->add_option("input", in.path, "Matrix file (.mtx Matrix Market or RPCA binary)");
  cmd->add_option("--format", in.format, "Input format")->check(CLI::IsMember({"mtx", "bin"}));
  cmd->add_option("--testgen", in.testgen, "Use the synthetic Hadamard test matrix: m=.. sigma=.. [k=..]")
      ->expected(1, 3);
}

std::vector<double> read_sigma(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw rpca::IoError("cannot open " + path.string());
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw rpca::ParseError("S.txt: not a number", lineno);
    }
  }
  return out;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw rpca::IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw rpca::ParseError(path.filename().string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

struct ApproxOptions {
  InputSpec input;
  rpca::Index k = 0;
  rpca::Index l = -1;
  rpca::Index i = 1;
  std::string variant = "power";
  std::uint64_t seed = rpca::kDefaultSeed;
  bool random_seed = false;
  bool guaranteed = false;
  bool certify = false;
  int power_iters = rpca::kDefaultPowerIterations;
  std::string out = ".";
};

int cmd_approx(const ApproxOptions& o) {
  const auto input = load_input(o.input);
  const auto& A = *input.op;

  rpca::SketchParams params;
  params.k = o.k;
  params.l = o.l >= 0 ? o.l : o.k + (o.guaranteed ? 12 : 2);
  params.i = o.i;
  params.variant = *rpca::parse_variant(o.variant);
  params.seed = o.random_seed ? (static_cast<std::uint64_t>(std::random_device{}()) << 32) | std::random_device{}()
                              : o.seed;

  rpca::CountingOperator counted(A);
  const auto start = std::chrono::steady_clock::now();
  auto factors = rpca::approximate(counted, params);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json report;
  report["input"] = input.description;
  report["m"] = A.rows();
  report["n"] = A.cols();
  report["k"] = params.k;
  report["l"] = params.l;
  report["i"] = params.i;
  report["variant"] = rpca::to_string(params.variant);
  report["seed"] = params.seed;
  report["approximates_transpose"] = factors.approximates_transpose;
  report["apply_counts"] = {{"A", counted.apply_columns()}, {"AT", counted.apply_transpose_columns()}};
  report["wall_seconds"] = wall;
  report["orthonormality"] = {{"U", rpca::orthonormality_residual(factors.U)},
                              {"V", rpca::orthonormality_residual(factors.V)}};
  const rpca::Index short_side = std::min(A.rows(), A.cols());
  report["bound_coefficient"] = rpca::theory::explicit_accuracy_coefficient(short_side, params.k, params.l, params.i);
  report["delta"] = nullptr;
  if (o.certify) {
    const auto residual = rpca::residual_operator(A, factors);
    const auto est = rpca::estimate_spectral_norm(residual, o.power_iters, rpca::certifier_seed(params.seed));
    report["delta"] = est.value;
    report["power_iterations"] = o.power_iters;
    report["certifier_seed"] = est.seed;
  }

  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw rpca::IoError("cannot create " + dir.string() + ": " + ec.message());
  rpca::io::write_rpca(dir / "U.rpca", factors.U);
  rpca::io::write_rpca(dir / "V.rpca", factors.V);
  {
    std::ofstream s(dir / "S.txt");
    if (!s) throw rpca::IoError("cannot write " + (dir / "S.txt").string());
    s << std::setprecision(17);
    for (rpca::Index j = 0; j < factors.sigma.size(); ++j) s << factors.sigma(j) << '\n';
  }
  {
    std::ofstream r(dir / "report.json");
    if (!r) throw rpca::IoError("cannot write " + (dir / "report.json").string());
    r << report.dump(2) << '\n';
  }

  std::cout << rpca::to_string(params.variant) << " k=" << params.k << " l=" << params.l << " i=" << params.i
            << " on " << A.shape().str() << " in " << std::setprecision(3) << wall << " s";
  if (o.certify) std::cout << ", delta = " << std::scientific << report["delta"].get<double>();
  std::cout << "\n";
  return kOk;
}

// Re-reads the factor files and reproduces the orthonormality residuals and delta.
int cmd_verify(const InputSpec& in, const std::string& out) {
  const fs::path dir(out);
  const auto report = read_json(dir / "report.json");
  rpca::LowRankFactors f;
  f.U = rpca::io::read_rpca(dir / "U.rpca");
  f.V = rpca::io::read_rpca(dir / "V.rpca");
  const auto sigma = read_sigma(dir / "S.txt");
  f.sigma = Eigen::Map<const rpca::Vector>(sigma.data(), static_cast<rpca::Index>(sigma.size()));
  f.approximates_transpose = report.value("approximates_transpose", false);

  bool ok = true;
  auto compare = [&](const char* name, double got, double want) {
    const bool same = std::abs(got - want) <= 1e-12 * std::max(std::abs(want), 1e-300) || got == want;
    std::cout << std::left << std::setw(14) << name << std::scientific << std::setprecision(6) << got
              << (same ? "  matches report\n" : "  MISMATCH, report has " + std::to_string(want) + "\n");
    ok = ok && same;
  };
  compare("orth(U)", rpca::orthonormality_residual(f.U), report.at("orthonormality").at("U").get<double>());
  compare("orth(V)", rpca::orthonormality_residual(f.V), report.at("orthonormality").at("V").get<double>());
  if (!report.at("delta").is_null()) {
    const auto input = load_input(in);
    const auto residual = rpca::residual_operator(*input.op, std::move(f));
    const auto est = rpca::estimate_spectral_norm(residual, report.at("power_iterations").get<int>(),
                                                  report.at("certifier_seed").get<std::uint64_t>());
    compare("delta", est.value, report.at("delta").get<double>());
  }
  return ok ? kOk : kMismatch;
}

std::string format_sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

int cmd_bench(int table, rpca::Index cap, const rpca::testgen::BenchOptions& options, const std::string& out) {
  const auto rows = rpca::testgen::run_benchmark(table, cap, options);
  std::cout << std::right << std::setw(8) << "m" << std::setw(9) << "n" << std::setw(5) << "i" << std::setw(11)
            << "t" << std::setw(12) << "sigma_k+1" << std::setw(12) << "delta"
            << "  variant\n";
  for (const auto& r : rows) {
    std::string i = "-";
    if (r.i) i = r.variant == "transpose" ? "(" + std::to_string(*r.i) + ")" : std::to_string(*r.i);
    std::cout << std::setw(8) << r.m << std::setw(9) << r.n << std::setw(5) << i << std::setw(11)
              << format_sci(r.t_seconds) << std::setw(12) << format_sci(r.sigma_k1) << std::setw(12)
              << format_sci(r.delta) << "  " << r.variant << "\n";
  }
  if (!out.empty()) {
    const fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw rpca::IoError("cannot create " + dir.string() + ": " + ec.message());
    const auto stem = "table" + std::to_string(table);
    std::ofstream csv(dir / (stem + ".csv"));
    std::ofstream js(dir / (stem + ".json"));
    if (!csv || !js) throw rpca::IoError("cannot write benchmark output in " + dir.string());
    rpca::testgen::write_csv(csv, rows);
    rpca::testgen::write_json(js, rows);
  }
  return kOk;
}

int cmd_bound(rpca::theory::BoundParams p, int sweep_i, rpca::Index j) {
  std::cout << std::scientific << std::setprecision(6);
  const auto report = rpca::theory::success_probability(p);
  std::cout << "m=" << p.m << " n=" << p.n << " k=" << p.k << " l=" << p.l << " i=" << p.i << " beta=" << p.beta
            << " gamma=" << p.gamma << "\n";
  std::cout << "accuracy coefficient      " << report.accuracy_coefficient << "\n";
  std::cout << "success probability (Pi)  " << report.success_probability << "\n";
  std::cout << "failure probability       " << report.failure_probability << "\n";
  for (const auto& t : report.terms) std::cout << "  term: " << std::left << std::setw(40) << t.label << t.value << "\n";
  if (sweep_i >= 0) {
    std::cout << "i sweep:\n";
    for (rpca::Index i = 0; i <= sweep_i; ++i) {
      p.i = i;
      std::cout << "  i=" << i << "  coefficient " << rpca::theory::accuracy_bound(p) << "\n";
    }
  }
  if (j > 0) {
    for (const auto& v : rpca::theory::auxiliary_bounds(p, j).labeled()) {
      std::cout << "  " << std::left << std::setw(24) << v.name << v.value << "  (" << v.source << ")\n";
    }
  }
  return kOk;
}

int cmd_spectrum(const rpca::testgen::SpectrumSpec& spec) {
  const auto sigma = rpca::testgen::build_spectrum(spec);
  std::cout << "j,sigma\n" << std::setprecision(17);
  for (rpca::Index j = 0; j < sigma.size(); ++j) std::cout << j + 1 << ',' << sigma(j) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized low-rank SVD via power-iteration sketching"};
  app.require_subcommand(1);

  ApproxOptions approx;
  auto* a = app.add_subcommand("approx", "Compute a rank-k approximation U diag(S) V^T");
  add_input_options(a, approx.input);
  a->add_option("--k", approx.k, "Target rank")->required();
  a->add_option("--l", approx.l, "Sketch size (default k+2, or k+12 with --guaranteed)");
  a->add_option("--i", approx.i, "Power iterations");
  a->add_option("--variant", approx.variant)->check(CLI::IsMember({"power", "transpose", "sixstep", "blanczos"}));
  a->add_option("--seed", approx.seed, "Sketch seed");
  a->add_flag("--random-seed", approx.random_seed, "Draw the sketch seed from the system entropy source");
  a->add_flag("--guaranteed", approx.guaranteed, "Default l to k+12");
  a->add_flag("--certify", approx.certify, "Estimate delta = ||A - U S V^T|| by the power method");
  a->add_option("--power-iters", approx.power_iters, "Power-method iterations for --certify");
  a->add_option("--out", approx.out, "Output directory");

  InputSpec verify_in;
  std::string verify_out = ".";
  auto* v = app.add_subcommand("verify", "Recheck factor files written by approx against report.json");
  add_input_options(v, verify_in);
  v->add_option("--out", verify_out, "Directory holding U.rpca, S.txt, V.rpca, report.json");

  int table = 0;
  rpca::Index cap = 4096;
  std::string bench_out;
  rpca::testgen::BenchOptions bench_opts;
  auto* b = app.add_subcommand("bench", "Reproduce a benchmark table (1-6) at desk scale");
  b->add_option("table", table, "Table number")->required();
  b->add_option("--cap", cap, "Largest m (power of two >= 512)");
  b->add_option("--trials", bench_opts.trials, "Trials per cell");
  b->add_option("--seed", bench_opts.base_seed, "First trial seed");
  b->add_option("--power-iters", bench_opts.power_iterations);
  b->add_option("--out", bench_out, "Directory for tableN.csv / tableN.json");

  rpca::theory::BoundParams bp;
  bp.m = 0;
  bp.k = 10;
  bp.l = -1;
  int sweep_i = -1;
  rpca::Index aux_j = 0;
  auto* bo = app.add_subcommand("bound", "Evaluate the accuracy bound and its success probability");
  bo->add_option("--m", bp.m)->required();
  bo->add_option("--n", bp.n, "Columns (default 2m)");
  bo->add_option("--k", bp.k);
  bo->add_option("--l", bp.l, "Sketch size (default k+12)");
  bo->add_option("--i", bp.i);
  bo->add_option("--beta", bp.beta);
  bo->add_option("--gamma", bp.gamma);
  bo->add_option("--sweep-i", sweep_i, "Also print the coefficient for i = 0..N");
  bo->add_option("--j", aux_j, "Also print the auxiliary Gaussian tail bounds for split index j");

  rpca::testgen::SpectrumSpec sp;
  auto* s = app.add_subcommand("spectrum", "Print the synthetic test spectrum as CSV");
  s->add_option("--m", sp.m);
  s->add_option("--k", sp.k);
  s->add_option("--sigma", sp.sigma_k1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kContract;
  }

  try {
    if (*a) return cmd_approx(approx);
    if (*v) return cmd_verify(verify_in, verify_out);
    if (*b) return cmd_bench(table, cap, bench_opts, bench_out);
    if (*bo) {
      if (bp.n == 0) bp.n = 2 * bp.m;
      if (bp.l < 0) bp.l = bp.k + 12;
      bp.validate();
      return cmd_bound(bp, sweep_i, aux_j);
    }
    if (*s) return cmd_spectrum(sp);
  } catch (const rpca::IoError& e) {
    std::cerr << "rpca: I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const rpca::ParseError& e) {
    std::cerr << "rpca: parse error: " << e.what() << "\n";
    return kParse;
  } catch (const rpca::ContractViolation& e) {
    std::cerr << "rpca: invalid parameters: " << e.what() << "\n";
    return kContract;
  } catch (const rpca::NumericalBreakdown& e) {
    std::cerr << "rpca: " << e.what() << "\n";
    return kNumerical;
  }
  return kContract;
}
