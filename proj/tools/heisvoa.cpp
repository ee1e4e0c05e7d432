// heisvoa: verification suites, vertex-algebra products and module decomposition.
// Exit codes: 0 success, 1 a check failed, 2 usage or input error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heisvoa/expr.hpp"
#include "heisvoa/heismod.hpp"
#include "heisvoa/quotient.hpp"
#include "heisvoa/serialize.hpp"
#include "heisvoa/suites.hpp"
#include "heisvoa/vertex.hpp"

namespace {

using namespace heisvoa;

constexpr int kUsage = 2;

// Flags shared by every subcommand.
struct CommonOptions {
  std::uint32_t p = 5;
  int dim = 1;
  std::int64_t level = 1;
  std::string gram;
  std::string lambda_file;
  std::string lambda0;
  std::int64_t max_weight = 3;
  std::int64_t max_total_weight = 0;
  std::int64_t mode_window = 1;
  std::uint64_t seed = 0;
  bool json = false;
  bool text = false;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--p", o.p, "prime characteristic")->capture_default_str();
  app->add_option("--dim", o.dim, "dimension of h")->capture_default_str();
  app->add_option("--level", o.level, "level l")->capture_default_str();
  app->add_option("--gram", o.gram, "diagonal of the form, comma separated (default all ones)");
  app->add_option("--lambda", o.lambda_file, "LambdaSpec JSON file");
  app->add_option("--lambda0", o.lambda0, "zero-mode character, comma separated");
  app->add_option("--max-weight", o.max_weight, "largest basis weight in the suites")->capture_default_str();
  app->add_option("--max-total-weight", o.max_total_weight, "bound on wt u + wt v + wt w for Borcherds (0 = min(3 max-weight, 9))")
      ->capture_default_str();
  app->add_option("--mode-window", o.mode_window, "largest mode depth for finite modules")->capture_default_str();
  app->add_option("--seed", o.seed, "seed for sampled checks")->capture_default_str();
  app->add_flag("--json", o.json, "JSON output");
  app->add_flag("--text", o.text, "human-readable output");
}

std::vector<std::int64_t> parse_list(const std::string& s, const char* what) {
  std::vector<std::int64_t> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": '" + item + "' is not an integer");
    }
    if (used != item.size()) throw UsageError(std::string(what) + ": '" + item + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

std::vector<Fp> residues(const std::vector<std::int64_t>& xs, std::uint32_t p) {
  std::vector<Fp> out;
  const auto P = static_cast<std::int64_t>(p);
  for (auto x : xs) out.emplace_back(static_cast<std::uint32_t>(((x % P) + P) % P));
  return out;
}

VerifyParams to_params(const CommonOptions& o) {
  if (o.p < 2 || o.p > 1000 || !is_prime(o.p)) throw UsageError("--p must be a prime <= 1000");
  VerifyParams P;
  P.p = o.p;
  P.dim = o.dim;
  P.level = o.level;
  P.max_weight = o.max_weight;
  P.max_total_weight = o.max_total_weight;
  P.mode_window = o.mode_window;
  P.seed = o.seed;
  P.gram = residues(parse_list(o.gram, "--gram"), o.p);
  for (auto x : parse_list(o.gram, "--gram"))
    if (x % static_cast<std::int64_t>(o.p) == 0) throw UsageError("--gram entries must be nonzero mod p");
  if (!o.lambda_file.empty()) {
    LambdaSpec l;
    try {
      l = lambda_from_json(read_json_file(o.lambda_file));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--lambda: ") + e.what());
    }
    if (l.p() != o.p || l.dim() != o.dim) throw UsageError("--lambda: file p/dim do not match --p/--dim");
    if (l.level() != o.level) throw UsageError("--lambda: file level does not match --level");
    P.lambda = l;
    for (auto v : l.lambda0())
      if (v.value != 0) P.lambda0 = l.lambda0();
  }
  if (!o.lambda0.empty()) P.lambda0 = residues(parse_list(o.lambda0, "--lambda0"), o.p);
  return normalized(P);
}

int cmd_verify(const std::string& suite, const CommonOptions& o, bool timing) {
  const VerifyReport rep = run_suite(suite, to_params(o), timing);
  if (o.text)
    std::cout << rep.to_text();
  else
    std::cout << rep.to_json().dump(2) << '\n';
  return rep.passed() ? 0 : 1;
}

int cmd_product(const std::string& u_text, std::int64_t n, const std::string& v_text, const CommonOptions& o) {
  const VerifyParams P = to_params(o);
  const FockContext base = make_context(P);
  const FockContext ctx = P.lambda0.empty() ? base : base.with_lambda0(P.lambda0);
  const FockVector u = parse_vector(u_text, ctx.field(), ctx.dim());
  const FockVector v = parse_vector(v_text, ctx.field(), ctx.dim());
  if (n < -1000 || n > 1000) throw UsageError("mode index must lie in [-1000, 1000]");
  VertexEvaluator<FockAction> ev{FockAction(ctx)};
  FockVector out = ev.product(u, n, v);
  const bool reduce = !o.lambda_file.empty();
  if (reduce) out = normal_form(ctx, P.lambda, out);
  if (o.json) {
    Json j;
    j["u"] = u.str();
    j["n"] = n;
    j["v"] = v.str();
    j["reduced"] = reduce;
    j["result"] = out.str();
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << out.str() << '\n';
  }
  return 0;
}

HeisModule load_module(const std::string& path) {
  try {
    return module_from_json(read_json_file(path));
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw UsageError(path + ": " + e.what());
  }
}

int cmd_decompose(const std::string& path, const CommonOptions& o) {
  const HeisModule W = load_module(path);
  const CheckResult inv = check_module_invariants(W);
  if (!inv.passed()) {
    std::cerr << "error: module invariants fail: " << inv.note << '\n';
    for (const auto& [k, v] : inv.counterexample) std::cerr << "  " << k << " = " << v << '\n';
    return kUsage;
  }
  if (W.level().value == 0) throw UsageError("decomposition needs a nonzero level");
  const CheckResult c0 = check_C0(W);
  if (!c0.passed()) {
    std::cerr << "error: condition C0 fails: " << c0.note << '\n';
    for (const auto& [k, v] : c0.counterexample) std::cerr << "  " << k << " = " << v << '\n';
    return kUsage;
  }
  const Decomposition D = decompose(W, 20, o.seed);
  std::size_t total = 0;
  for (const auto& s : D.summands) total += s.basis.size();
  if (o.json) {
    Json j;
    j["dimension"] = W.dim();
    Json ss = Json::array();
    for (const auto& s : D.summands) {
      Json t = to_json(s.tag);
      ss.push_back(Json{{"dimension", s.basis.size()}, {"irreducible", s.irreducible}, {"tag", {{"lambda0", t["lambda0"]}, {"lambda", t["lambda"]}}}});
    }
    j["summands"] = ss;
    j["summand_dimension_sum"] = total;
    j["residual"] = D.residual;
    j["direct"] = D.direct;
    if (!D.note.empty()) j["note"] = D.note;
    j["status"] = D.ok() ? "pass" : "fail";
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "module of dimension " << W.dim() << ": " << D.summands.size() << " summand(s)\n";
    for (std::size_t i = 0; i < D.summands.size(); ++i) {
      const auto& s = D.summands[i];
      std::cout << "  summand " << i + 1 << ": dimension " << s.basis.size() << (s.irreducible ? ", irreducible" : ", reducible")
                << ", lambda0 = [";
      for (std::size_t k = 0; k < s.tag.lambda0().size(); ++k) std::cout << (k ? "," : "") << s.tag.lambda0()[k].value;
      std::cout << "], lambda = " << detail::lambda_text(s.tag) << '\n';
    }
    std::cout << "dimension sum " << total << ", residual " << D.residual << (D.direct ? "" : ", sum not direct") << '\n';
    if (!D.note.empty()) std::cout << "note: " << D.note << '\n';
  }
  return D.ok() ? 0 : 1;
}

int cmd_module(const CommonOptions& o, bool twice, const std::string& other_file) {
  const VerifyParams P = to_params(o);
  const FockContext ctx = make_context(P);
  const ModeSet T = detail::heisenberg_modes(P);
  const HeisModule W = build_irreducible(ctx, T, P.lambda, P.mode_window);
  if (!twice) {
    std::cout << to_json(W).dump(2) << '\n';
    return 0;
  }
  LambdaSpec other = P.lambda;
  if (!other_file.empty()) {
    try {
      other = lambda_from_json(read_json_file(other_file));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--other-lambda: ") + e.what());
    }
    if (other.p() != P.p || other.dim() != P.dim) throw UsageError("--other-lambda: file p/dim do not match --p/--dim");
  }
  const HeisModule W2 = build_irreducible(ctx, T, other, P.mode_window);
  std::mt19937_64 rng(P.seed);
  const HeisModule sum = conjugate(direct_sum(W, W2), random_invertible(ctx.field(), 2 * W.dim(), rng));
  std::cout << to_json(sum).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heisenberg vertex algebras over GF(p): verification, products, module decomposition"};
  app.require_subcommand(1);

  CommonOptions verify_o, product_o, decompose_o, module_o;

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string suite;
  bool timing = false;
  verify->add_option("suite", suite, "axioms | conformal | ideal | pth-power | heisenberg | all")
      ->required()
      ->check(CLI::IsMember(suite_names()));
  verify->add_flag("--timing", timing, "include wall time per check (reports are then not reproducible)");
  add_common(verify, verify_o);

  auto* product = app.add_subcommand("product", "print u_n v in V(l,0) (or M(l,lambda0))");
  std::string u_text, v_text;
  std::int64_t n = 0;
  product->add_option("u", u_text, "vector u")->required();
  product->add_option("n", n, "mode index")->required();
  product->add_option("v", v_text, "vector v")->required();
  add_common(product, product_o);

  auto* dec = app.add_subcommand("decompose", "decompose a module file into irreducible summands");
  std::string module_file;
  dec->add_option("file", module_file, "HeisModule JSON file")->required();
  add_common(dec, decompose_o);

  auto* mod = app.add_subcommand("module", "write the module P[T, lambda] (or a conjugated P + P') as JSON");
  bool twice = false;
  std::string other_file;
  mod->add_flag("--double", twice, "emit P[T, lambda] + P[T, lambda'] in a random basis");
  mod->add_option("--other-lambda", other_file, "LambdaSpec JSON for lambda' (default: lambda)");
  add_common(mod, module_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*verify) return cmd_verify(suite, verify_o, timing);
    if (*product) return cmd_product(u_text, n, v_text, product_o);
    if (*dec) return cmd_decompose(module_file, decompose_o);
    if (*mod) return cmd_module(module_o, twice, other_file);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
