#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "optsample/baselines.hpp"
#include "optsample/ddg.hpp"
#include "optsample/io.hpp"
#include "optsample/numsys.hpp"
#include "optsample/optimize.hpp"
#include "optsample/runtime.hpp"

namespace {

using nlohmann::json;
using namespace optsample;

struct Options {
  std::string dist_path;
  std::string approx_path;
  std::string encoding_path;
  std::string out_path;
  uint32_t bits = 16;
  std::string divergence = "tv";
  std::string alpha;
  std::string mode = "auto";  // exact | float | auto
  uint32_t mantissa_bits = 256;
  std::string approx_class = "all";  // all | dyadic
  uint64_t seed = 0;
  uint64_t num = 1;
  std::string format;                  // build: json|binary
  std::string sample_format = "counts";  // sample: stream|counts
  bool le_variant = false;
  std::string bits_list;
  std::string divergence_list;
  // gen
  std::string family;
  uint64_t gen_n = 50;
  std::string gen_p = "61/500";
  uint64_t gen_population = 20;
  uint64_t gen_successes = 7;
  uint64_t gen_draws = 5;
  std::string gen_sigma = "2";
  uint64_t gen_span = 20;
};

unsigned long order_budget_from_env() {
  const char* v = std::getenv("OPTSAMPLE_ORDER_BUDGET");
  if (v == nullptr || *v == '\0') return 1000000;
  return std::strtoul(v, nullptr, 10);
}

DivergenceKind parse_kind(const Options& opt) {
  std::string name = opt.divergence;
  if (!opt.alpha.empty()) name = "alpha:" + opt.alpha;
  return DivergenceKind::parse(name);
}

EvalContext make_context(const Options& opt, const DivergenceKind& kind) {
  if (opt.mode == "exact") return EvalContext::exact();
  if (opt.mode == "float") return EvalContext::flt(opt.mantissa_bits);
  return kind.exact_capable() ? EvalContext::exact()
                              : EvalContext::flt(opt.mantissa_bits);
}

json config_echo(const std::string& subcommand, const Options& opt) {
  json c;
  c["subcommand"] = subcommand;
  if (!opt.dist_path.empty()) c["dist"] = opt.dist_path;
  if (!opt.approx_path.empty()) c["approx"] = opt.approx_path;
  if (!opt.encoding_path.empty()) c["encoding"] = opt.encoding_path;
  if (subcommand == "approx" || subcommand == "build" || subcommand == "compare") {
    c["bits"] = opt.bits;
    c["divergence"] = parse_kind(opt).name();
    c["mode"] = make_context(opt, parse_kind(opt)).mode == EvalMode::kExact
                    ? "exact"
                    : "float";
    c["mantissa_bits"] = opt.mantissa_bits;
    c["class"] = opt.approx_class;
  }
  if (subcommand == "sample") {
    c["seed"] = opt.seed;
    c["num"] = opt.num;
    c["format"] = opt.sample_format;
  }
  if (subcommand == "sweep") {
    c["bits_list"] = opt.bits_list;
    c["divergence_list"] = opt.divergence_list;
    c["mode"] = opt.mode;
    c["mantissa_bits"] = opt.mantissa_bits;
    c["class"] = opt.approx_class;
  }
  return c;
}

void emit(const std::string& out_path, const json& j) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    save_json(out_path, j);
  }
}

void emit_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    save_text(out_path, text);
  }
}

ApproxResult run_approx(const Options& opt, const std::vector<Rational>& p) {
  const DivergenceKind kind = parse_kind(opt);
  const EvalContext ctx = make_context(opt, kind);
  const ApproxClass cls = opt.approx_class == "dyadic"
                              ? ApproxClass::kBoundedDyadic
                              : ApproxClass::kAllEntropyOptimal;
  return closest_approx(p, opt.bits, kind, ctx, cls);
}

int cmd_approx(const Options& opt) {
  const std::vector<Rational> p = load_distribution(opt.dist_path);
  const ApproxResult r = run_approx(opt, p);
  json j = approx_result_to_json(r);
  j["config"] = config_echo("approx", opt);
  std::cout << "k=" << r.spec.k << " l=" << r.spec.l
            << " Z=" << r.assignment.z.get_str() << " error=" << r.error.str()
            << "\n";
  if (!opt.out_path.empty()) {
    save_json(opt.out_path, j);
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

LinearEncoding encoding_for_build(const Options& opt) {
  if (!opt.approx_path.empty()) {
    const ApproxArtifact a = approx_result_from_json(load_json(opt.approx_path));
    return build_encoding(a.assignment, a.spec);
  }
  if (opt.dist_path.empty()) {
    throw IoError("build needs --approx or --dist");
  }
  const std::vector<Rational> p = load_distribution(opt.dist_path);
  const ApproxResult r = run_approx(opt, p);
  return build_encoding(r.assignment, r.spec);
}

int cmd_build(const Options& opt) {
  const LinearEncoding e = encoding_for_build(opt);
  const bool binary =
      opt.format == "binary" ||
      (opt.format.empty() && (opt.out_path.ends_with(".ddg") ||
                              opt.out_path.ends_with(".bin")));
  if (binary) {
    if (opt.out_path.empty()) {
      throw IoError("binary encodings need --out");
    }
    save_encoding_binary(opt.out_path, e);
  } else {
    json j = encoding_to_json(e);
    j["config"] = config_echo("build", opt);
    emit(opt.out_path, j);
  }
  std::cerr << "cells=" << e.enc.size() << " n=" << e.n << " k=" << e.k
            << " l=" << e.l << "\n";
  return 0;
}

int cmd_sample(const Options& opt) {
  const LinearEncoding e = load_encoding(opt.encoding_path);
  SplitMix64Source src(opt.seed);
  if (opt.sample_format == "stream") {
    std::ostringstream out;
    for (uint64_t i = 0; i < opt.num; ++i) {
      out << *sample_encoding(e, src) << "\n";
    }
    emit_text(opt.out_path, out.str());
    return 0;
  }
  std::vector<uint64_t> counts(e.n, 0);
  for (uint64_t i = 0; i < opt.num; ++i) {
    counts[*sample_encoding(e, src)] += 1;
  }
  json j;
  j["counts"] = counts;
  j["samples"] = opt.num;
  j["bits_consumed"] = src.bits_consumed();
  j["seed"] = opt.seed;
  j["config"] = config_echo("sample", opt);
  emit(opt.out_path, j);
  return 0;
}

int cmd_analyze(const Options& opt) {
  const LinearEncoding e = load_encoding(opt.encoding_path);
  const AnalysisReport r = analyze_encoding(e);
  json j;
  j["n"] = e.n;
  j["k"] = e.k;
  j["l"] = e.l;
  json dist = json::array();
  for (const Rational& p : r.output_distribution) dist.push_back(p.str());
  j["output_distribution"] = std::move(dist);
  j["expected_bits"] = r.expected_bits.str();
  j["entropy"] = r.entropy.to_double();
  if (!opt.dist_path.empty()) {
    const std::vector<Rational> target = load_distribution(opt.dist_path);
    const DivergenceKind kind = parse_kind(opt);
    const EvalContext ctx = make_context(opt, kind);
    std::vector<mpz_class> m;
    const mpz_class z = z_kl(PrecisionSpec{e.k, e.l});
    for (const Rational& q : r.output_distribution) {
      const Rational scaled = q * Rational(z);
      if (!scaled.is_integer()) {
        throw StructuralError("output distribution is not over the declared Z");
      }
      m.push_back(scaled.num());
    }
    j["error_vs_target"] = divergence(target, m, z, kind, ctx).str();
    j["divergence"] = kind.name();
  }
  j["config"] = config_echo("analyze", opt);
  emit(opt.out_path, j);
  return 0;
}

int cmd_exact_precision(const Options& opt) {
  const std::vector<Rational> p = load_distribution(opt.dist_path);
  const ExactPrecision e = minimal_exact_precision(p, order_budget_from_env());
  json j;
  if (e.k.fits_uint_p()) {
    j["k"] = e.k.get_ui();
  } else {
    j["k"] = e.k.get_str();
  }
  j["l"] = static_cast<unsigned long>(e.l.get_ui());
  if (e.k <= 4096) {
    j["Z"] = z_kl(PrecisionSpec{static_cast<uint32_t>(e.k.get_ui()),
                                static_cast<uint32_t>(e.l.get_ui())})
                 .get_str();
  }
  j["config"] = config_echo("exact-precision", opt);
  emit(opt.out_path, j);
  return 0;
}

// One CSV row per method; error measured by the requested divergence.
int cmd_compare(const Options& opt) {
  const std::vector<Rational> p = load_distribution(opt.dist_path);
  const DivergenceKind kind = parse_kind(opt);
  const EvalContext ctx = make_context(opt, kind);
  std::ostringstream csv;
  csv << "method,k,l,Z,divergence,error,expected_bits\n";

  {
    const ApproxResult r = run_approx(opt, p);
    const LinearEncoding e = build_encoding(r.assignment, r.spec);
    const AnalysisReport rep = analyze_encoding(e);
    csv << "optimal," << r.spec.k << "," << r.spec.l << ","
        << r.assignment.z.get_str() << "," << kind.name() << ","
        << r.error.str() << "," << rep.expected_bits.str() << "\n";
  }
  {
    // Rejection draws words of the common-denominator width; it is exact.
    mpz_class denom = 1;
    for (const Rational& q : p) denom = lcm(denom, q.den());
    std::vector<mpz_class> m;
    for (const Rational& q : p) m.push_back(mpz_class(q.num() * (denom / q.den())));
    const uint32_t k = rejection_bit_width(denom);
    csv << "rejection," << k << ",," << denom.get_str() << "," << kind.name()
        << ",0," << rejection_expected_bits(denom, k).str() << "\n";
  }
  {
    const std::vector<Rational> out =
        inversion_output_distribution(p, opt.bits, opt.le_variant);
    mpz_class z = 1;
    for (const Rational& q : out) z = lcm(z, q.den());
    std::vector<mpz_class> m;
    for (const Rational& q : out) m.push_back(mpz_class(q.num() * (z / q.den())));
    const ExtReal err = divergence(p, m, z, kind, ctx);
    csv << "inversion," << opt.bits << ",," << z.get_str() << "," << kind.name()
        << "," << err.str() << "," << opt.bits << "\n";
  }
  emit_text(opt.out_path, csv.str());
  return 0;
}

int cmd_sweep(const Options& opt) {
  const std::vector<Rational> p = load_distribution(opt.dist_path);
  std::vector<uint32_t> ks;
  {
    std::stringstream ss(opt.bits_list.empty() ? std::string("4,8,16") : opt.bits_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) ks.push_back(static_cast<uint32_t>(std::stoul(tok)));
  }
  std::vector<DivergenceKind> kinds;
  {
    std::stringstream ss(opt.divergence_list.empty() ? std::string("tv") : opt.divergence_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) kinds.push_back(DivergenceKind::parse(tok));
  }
  const ApproxClass cls = opt.approx_class == "dyadic"
                              ? ApproxClass::kBoundedDyadic
                              : ApproxClass::kAllEntropyOptimal;
  std::ostringstream csv;
  csv << "k,divergence,l,Z,error,expected_bits\n";
  for (const uint32_t k : ks) {
    for (const DivergenceKind& kind : kinds) {
      EvalContext ctx = opt.mode == "exact" ? EvalContext::exact()
                        : opt.mode == "float"
                            ? EvalContext::flt(opt.mantissa_bits)
                            : (kind.exact_capable() ? EvalContext::exact()
                                                    : EvalContext::flt(opt.mantissa_bits));
      const ApproxResult r = closest_approx(p, k, kind, ctx, cls);
      std::string bits;
      if (k <= 24 && p.size() * k <= 4096) {
        const LinearEncoding e = build_encoding(r.assignment, r.spec);
        bits = analyze_encoding(e).expected_bits.str();
      }
      csv << k << "," << kind.name() << "," << r.spec.l << ","
          << r.assignment.z.get_str() << "," << r.error.str() << "," << bits
          << "\n";
    }
  }
  emit_text(opt.out_path, csv.str());
  return 0;
}

int cmd_gen(const Options& opt) {
  std::vector<std::string> weights;
  if (opt.family == "binomial") {
    const Rational prob = Rational::parse(opt.gen_p);
    const Rational q = Rational(1) - prob;
    for (uint64_t i = 0; i <= opt.gen_n; ++i) {
      mpz_class c;
      mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(opt.gen_n),
                   static_cast<unsigned long>(i));
      Rational term(c);
      for (uint64_t j = 0; j < i; ++j) term = term * prob;
      for (uint64_t j = 0; j < opt.gen_n - i; ++j) term = term * q;
      weights.push_back(term.str());
    }
  } else if (opt.family == "hypergeometric") {
    // P(X = i) over draws from a population with a marked subset.
    const uint64_t lo =
        opt.gen_draws > opt.gen_population - opt.gen_successes
            ? opt.gen_draws - (opt.gen_population - opt.gen_successes)
            : 0;
    const uint64_t hi = std::min(opt.gen_draws, opt.gen_successes);
    mpz_class total;
    mpz_bin_uiui(total.get_mpz_t(), static_cast<unsigned long>(opt.gen_population),
                 static_cast<unsigned long>(opt.gen_draws));
    for (uint64_t i = lo; i <= hi; ++i) {
      mpz_class a, b;
      mpz_bin_uiui(a.get_mpz_t(), static_cast<unsigned long>(opt.gen_successes),
                   static_cast<unsigned long>(i));
      mpz_bin_uiui(b.get_mpz_t(),
                   static_cast<unsigned long>(opt.gen_population - opt.gen_successes),
                   static_cast<unsigned long>(opt.gen_draws - i));
      weights.push_back(Rational(mpz_class(a * b), total).str());
    }
  } else if (opt.family == "dgauss") {
    // Discrete Gaussian weights exp(-i^2 / (2 sigma^2)) over a centered span,
    // derived from doubles and snapped to their exact dyadic values.
    const double sigma = Rational::parse(opt.gen_sigma).to_double();
    if (!(sigma > 0)) throw std::domain_error("sigma must be positive");
    const int64_t span = static_cast<int64_t>(opt.gen_span);
    for (int64_t i = -span; i <= span; ++i) {
      const double w =
          std::exp(-static_cast<double>(i) * static_cast<double>(i) /
                   (2.0 * sigma * sigma));
      weights.push_back(Rational(mpq_class(w)).str());
    }
  } else {
    throw std::domain_error("unknown family: " + opt.family);
  }
  if (opt.out_path.empty()) {
    json j;
    j["weights"] = weights;
    std::cout << j.dump(2) << "\n";
  } else {
    save_weights(opt.out_path, weights);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal approximate sampling for discrete distributions"};
  app.require_subcommand(1);
  Options opt;

  auto add_target_flags = [&](CLI::App* cmd, bool need_dist) {
    auto* d = cmd->add_option("--dist", opt.dist_path, "distribution JSON file");
    if (need_dist) d->required();
    cmd->add_option("--bits", opt.bits, "precision k");
    cmd->add_option("--divergence", opt.divergence,
                    "tv|hellinger|pearson-chi2|triangular|reverse-kl|forward-kl|alpha:<a>");
    cmd->add_option("--alpha", opt.alpha, "alpha parameter (implies alpha divergence)");
    cmd->add_option("--mode", opt.mode, "exact|float|auto")
        ->check(CLI::IsMember({"exact", "float", "auto"}));
    cmd->add_option("--mantissa-bits", opt.mantissa_bits, "float mode mantissa width");
    cmd->add_option("--class", opt.approx_class, "all|dyadic")
        ->check(CLI::IsMember({"all", "dyadic"}));
  };

  CLI::App* approx = app.add_subcommand("approx", "closest k-bit approximation");
  add_target_flags(approx, true);
  approx->add_option("--out", opt.out_path, "output JSON path");

  CLI::App* build = app.add_subcommand("build", "build the sampler encoding");
  add_target_flags(build, false);
  build->add_option("--approx", opt.approx_path, "approximation JSON from `approx`");
  build->add_option("--format", opt.format, "json|binary")
      ->check(CLI::IsMember({"json", "binary"}));
  build->add_option("--out", opt.out_path, "output path");

  CLI::App* sample = app.add_subcommand("sample", "draw samples from an encoding");
  sample->add_option("--encoding", opt.encoding_path, "encoding file")->required();
  sample->add_option("--num", opt.num, "number of samples");
  sample->add_option("--seed", opt.seed, "PRNG seed");
  sample->add_option("--format", opt.sample_format, "stream|counts")
      ->check(CLI::IsMember({"stream", "counts"}));
  sample->add_option("--out", opt.out_path, "output path");

  CLI::App* analyze = app.add_subcommand("analyze", "exact analysis of an encoding");
  analyze->add_option("--encoding", opt.encoding_path, "encoding file")->required();
  add_target_flags(analyze, false);
  analyze->add_option("--out", opt.out_path, "output JSON path");

  CLI::App* exact_prec =
      app.add_subcommand("exact-precision", "minimal k, l for an exact sampler");
  exact_prec->add_option("--dist", opt.dist_path, "distribution JSON file")->required();
  exact_prec->add_option("--out", opt.out_path, "output JSON path");

  CLI::App* compare =
      app.add_subcommand("compare", "optimal vs rejection vs inversion CSV");
  add_target_flags(compare, true);
  compare->add_flag("--le-variant", opt.le_variant,
                    "inversion compares with <= instead of <");
  compare->add_option("--out", opt.out_path, "output CSV path");

  CLI::App* sweep = app.add_subcommand("sweep", "error/bits over k and divergences");
  sweep->add_option("--dist", opt.dist_path, "distribution JSON file")->required();
  sweep->add_option("--bits-list", opt.bits_list, "comma list of k values");
  sweep->add_option("--divergence-list", opt.divergence_list, "comma list of names");
  sweep->add_option("--mode", opt.mode, "exact|float|auto")
      ->check(CLI::IsMember({"exact", "float", "auto"}));
  sweep->add_option("--mantissa-bits", opt.mantissa_bits, "float mode mantissa width");
  sweep->add_option("--class", opt.approx_class, "all|dyadic")
      ->check(CLI::IsMember({"all", "dyadic"}));
  sweep->add_option("--out", opt.out_path, "output CSV path");

  CLI::App* gen = app.add_subcommand("gen", "emit weight files for test families");
  gen->add_option("--family", opt.family, "binomial|hypergeometric|dgauss")->required();
  gen->add_option("--n", opt.gen_n, "binomial trial count");
  gen->add_option("--p", opt.gen_p, "binomial success probability (rational)");
  gen->add_option("--population", opt.gen_population, "hypergeometric population");
  gen->add_option("--successes", opt.gen_successes, "hypergeometric marked count");
  gen->add_option("--draws", opt.gen_draws, "hypergeometric draw count");
  gen->add_option("--sigma", opt.gen_sigma, "discrete Gaussian scale (rational)");
  gen->add_option("--span", opt.gen_span, "discrete Gaussian support half-width");
  gen->add_option("--out", opt.out_path, "output JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints the message; --help lands here too
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*approx) return cmd_approx(opt);
    if (*build) return cmd_build(opt);
    if (*sample) return cmd_sample(opt);
    if (*analyze) return cmd_analyze(opt);
    if (*exact_prec) return cmd_exact_precision(opt);
    if (*compare) return cmd_compare(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*gen) return cmd_gen(opt);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    if (dynamic_cast<const IoError*>(&e) != nullptr) {
      err["type"] = "io";
    } else if (dynamic_cast<const StructuralError*>(&e) != nullptr) {
      err["type"] = "structural";
    } else if (dynamic_cast<const OrderBudgetError*>(&e) != nullptr) {
      err["type"] = "order-budget";
    } else if (dynamic_cast<const std::domain_error*>(&e) != nullptr) {
      err["type"] = "domain";
    } else {
      err["type"] = "internal";
    }
    std::cerr << err.dump() << "\n";
    return 2;
  }
  return 1;
}
