#include "cstarframe/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "cstarframe/errors.hpp"
#include "cstarframe/random.hpp"

namespace csf {

namespace {

constexpr std::uint64_t kRequestStream = 0x5245'5155;  // "REQU"
constexpr std::uint64_t kProfileStream = 0x5052'4f46;  // "PROF"

// Runs fn(0..n-1) on up to `workers` threads; results keep index order.
std::vector<Json> parallel_map(std::size_t n, std::size_t workers, const std::function<Json(std::size_t)>& fn) {
  std::vector<Json> out(n);
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

Json error_json(const Error& e) { return Json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}; }

CheckOptions options_for(const Instance& inst, const RunFlags& flags, std::uint64_t index) {
  CheckOptions o;
  o.tol = flags.tol.value_or(inst.tolerances.tol);
  o.eps_strict = flags.eps_strict.value_or(inst.tolerances.eps_strict);
  o.samples = flags.samples.value_or(inst.tolerances.samples);
  o.seed = Rng::derive(flags.seed.value_or(inst.seed), {kRequestStream, index}).engine()();
  return o;
}

Json request_json(const Request& r) {
  Json j;
  j[r.construction ? "construct" : "check"] = r.action;
  j[r.action == "closed-range" ? "operator" : "family"] = r.target;
  if (r.k) j["k"] = *r.k;
  if (r.k2) j["k2"] = *r.k2;
  if (r.lower) j["lower"] = *r.lower;
  if (r.upper) j["upper"] = *r.upper;
  if (r.n) j["n"] = *r.n;
  return j;
}

FrameReport run_check(const Instance& inst, const Request& r, const CheckOptions& o) {
  const std::string& a = r.action;
  auto k = [&] { return inst.op(*r.k); };
  if (a == "g-frame") return check_g_frame(inst.as_operator_family(r.target), o.tol);
  if (a == "vector-frame") return check_vector_frame(inst.vector_family(r.target), o.tol);
  if (a == "k-g-frame") return check_k_g_frame(inst.as_operator_family(r.target), k(), o.tol);
  if (a == "star-frame") return check_star_frame_commutative(inst.vector_family(r.target), o);
  if (a == "star-g-frame") return check_star_g_frame_commutative(inst.as_operator_family(r.target), o);
  if (a == "star-k-frame") return check_star_k_frame_commutative(inst.vector_family(r.target), k(), o);
  if (a == "star-k-g-frame") return check_star_k_g_frame_commutative(inst.as_operator_family(r.target), k(), o);
  if (a == "star-sampled") {
    std::optional<AdjointableOp> kk;
    if (r.k) kk = k();
    return check_star_sampled(inst.as_operator_family(r.target), kk, inst.element(*r.lower), inst.element(*r.upper),
                              o);
  }
  if (a == "end-frame") return check_end_frame(inst.as_operator_family(r.target), o);
  if (a == "k-end-frame") return check_k_end_frame(inst.as_operator_family(r.target), k(), o);
  if (a == "generalized-end-frame") return check_generalized_end_frame(inst.as_operator_family(r.target), o);
  if (a == "generalized-k-end-frame") {
    return check_generalized_k_end_frame(inst.as_operator_family(r.target), k(), o);
  }
  throw Error(ErrorKind::ValidationError, "unknown check '" + a + "'");
}

// Body and verdict of one request.
std::pair<Json, bool> run_request(const Instance& inst, const Request& r, const CheckOptions& o) {
  if (!r.construction && r.action == "closed-range") {
    const AdjointableOp& t = inst.op(r.target);
    const ClosedRangeBounds cr = closed_range_bounds(t);
    bool sandwich = false;
    if (cr.injective_closed_range) {
      const AdjointableOp gram = compose(adjoint(t), t);
      const AdjointableOp id = AdjointableOp::identity(t.domain());
      sandwich = is_psd_order(scale(id, cr.lower), gram, o.tol) && is_psd_order(gram, scale(id, cr.upper), o.tol);
    }
    const bool pass = cr.injective_closed_range && sandwich;
    return {Json{{"closed_range", Json{{"injective_closed_range", cr.injective_closed_range},
                                       {"lower", cr.lower},
                                       {"upper", cr.upper},
                                       {"sandwich_holds", sandwich}}}},
            pass};
  }
  if (!r.construction) {
    const FrameReport rep = run_check(inst, r, o);
    return {Json{{"report", to_json(rep)}}, rep.pass};
  }
  const std::string& a = r.action;
  const OperatorFamily f = inst.as_operator_family(r.target);
  auto k = [&] { return inst.op(*r.k); };
  auto family_body = [](const FamilyConstruction& c) {
    return std::pair<Json, bool>{Json{{"certificate", to_json(c.certificate)}, {"family", to_json(c.family)}},
                                 c.certificate.pass};
  };
  auto cert_body = [](const ConstructionCertificate& c) {
    return std::pair<Json, bool>{Json{{"certificate", to_json(c)}}, c.pass};
  };
  if (a == "direct-sum-lift") {
    std::optional<AdjointableOp> kk;
    if (r.k) kk = k();
    return family_body(direct_sum_lift(f, kk, o));
  }
  if (a == "parseval-k") {
    const OperatorConstruction c = parseval_k_from_family(f, o);
    return {Json{{"certificate", to_json(c.certificate)}, {"k", to_json(c.op)}}, c.certificate.pass};
  }
  if (a == "k-frame-from-frame") return family_body(k_frame_from_frame(f, k(), o));
  if (a == "k2k1") return family_body(k2k1_frame(f, k(), inst.op(*r.k2), o));
  if (a == "power-k") return family_body(power_k_frame(f, k(), r.n.value_or(0), o));
  if (a == "surjective-demotion") return cert_body(surjective_demotion(f, k(), o));
  if (a == "injective-example") return family_body(example_frame_injective(f.members(), o));
  if (a == "frame-as-k-frame") return cert_body(frame_as_k_frame(f, k(), o));
  throw Error(ErrorKind::ValidationError, "unknown construction '" + a + "'");
}

Json header(const char* command, std::uint64_t seed) {
  return Json{{"tool", "cstarframe"}, {"version", kToolVersion}, {"command", command}, {"seed", seed}};
}

RunReport run_requests(const char* command, const Instance& inst, const std::vector<Request>& requests,
                       const RunFlags& flags) {
  const std::vector<Json> results = parallel_map(requests.size(), flags.parallel, [&](std::size_t i) {
    const Request& r = requests[i];
    Json entry{{"index", i}, {"request", request_json(r)}};
    try {
      auto [body, pass] = run_request(inst, r, options_for(inst, flags, i));
      entry["verdict"] = pass ? "pass" : "fail";
      for (auto& [key, value] : body.items()) entry[key] = value;
    } catch (const Error& e) {
      entry["verdict"] = "fail";
      const Json ej = error_json(e);
      for (auto& [key, value] : ej.items()) entry[key] = value;
    }
    return entry;
  });

  const CheckOptions base = options_for(inst, flags, 0);
  Json report = header(command, flags.seed.value_or(inst.seed));
  report["tolerances"] = Json{{"tol", base.tol}, {"eps_strict", base.eps_strict}, {"samples", base.samples}};
  std::size_t passed = 0;
  for (const auto& r : results) passed += r["verdict"] == "pass" ? 1 : 0;
  report["results"] = results;
  report["summary"] = Json{{"total", results.size()}, {"passed", passed}, {"failed", results.size() - passed}};
  const bool ok = passed == results.size();
  report["status"] = ok ? "pass" : "fail";
  return {std::move(report), ok ? 0 : 1};
}

// ---------------------------------------------------------------------------
// Instance generation.

struct Builder {
  Instance inst;

  std::string space(const std::string& name, int rank) {
    inst.spaces.push_back({name, ModuleSpace(inst.algebra, rank)});
    return name;
  }
  std::string op(const std::string& name, AdjointableOp t) {
    inst.operators.push_back({name, std::move(t)});
    return name;
  }
  std::string family(const std::string& name, const std::string& domain, const std::vector<AdjointableOp>& ops,
                     const std::string& prefix) {
    FamilyRef ref{name, false, domain, {}};
    for (std::size_t i = 0; i < ops.size(); ++i) ref.members.push_back(op(prefix + std::to_string(i), ops[i]));
    inst.families.push_back(std::move(ref));
    return name;
  }
  std::string vectors(const std::string& name, const std::string& space, const std::vector<ModuleVector>& xs) {
    FamilyRef ref{name, true, space, {}};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const std::string vname = "x" + std::to_string(i);
      inst.vectors.push_back({vname, xs[i]});
      ref.members.push_back(vname);
    }
    inst.families.push_back(std::move(ref));
    return name;
  }
  void check(const std::string& action, const std::string& target, std::optional<std::string> k = std::nullopt) {
    Request r;
    r.action = action;
    r.target = target;
    r.k = std::move(k);
    inst.requests.push_back(std::move(r));
  }
  void construct(const std::string& action, const std::string& target, std::optional<std::string> k = std::nullopt) {
    check(action, target, std::move(k));
    inst.requests.back().construction = true;
  }
};

Instance generate(std::uint64_t seed, const std::string& profile) {
  Rng rng = Rng::derive(seed, {kProfileStream});
  Builder b;
  b.inst.seed = seed;
  const bool commutative = profile == "star-commutative";
  b.inst.algebra = commutative ? random_commutative_spec(rng, 3) : random_spec(rng, 3, 2);
  const int r = rng.uniform_int(1, 3);
  const ModuleSpace h(b.inst.algebra, r);
  b.space("H", r);

  if (profile == "g-frame") {
    const int n = rng.uniform_int(1, 4);
    std::vector<AdjointableOp> ops;
    for (int i = 0; i < n; ++i) {
      const int rank = i == 0 ? r + rng.uniform_int(0, 1) : rng.uniform_int(1, 3);
      const ModuleSpace cod(b.inst.algebra, rank);
      const std::string cname = b.inst.add_space(cod);
      (void)cname;
      ops.push_back(i == 0 ? random_injective_operator(rng, h, cod) : random_operator(rng, h, cod));
    }
    b.check("g-frame", b.family("F", "H", ops, "T"));
  } else if (profile == "k-frame") {
    const ModuleSpace g(b.inst.algebra, rng.uniform_int(1, 3));
    b.space("G", g.rank());
    const int n = rng.uniform_int(1, 4);
    std::vector<AdjointableOp> ops;
    for (int i = 0; i < n; ++i) ops.push_back(random_operator(rng, h, g));
    // A corank-one projection on a one-dimensional block would zero the family.
    int smallest = b.inst.algebra.block_size(0);
    for (std::size_t j = 1; j < b.inst.algebra.num_blocks(); ++j) smallest = std::min(smallest, b.inst.algebra.block_size(j));
    if (rng.bernoulli(0.5) && r * smallest > 1) {
      const AdjointableOp p = random_corank_one_projection(rng, h);
      for (auto& t : ops) t = compose(t, p);
    }
    OperatorFamily f(h, ops);
    // Range of K inside the range of S^(1/2): K K^* <= ||R||^2 S.
    const AdjointableOp k = compose(operator_sqrt(frame_operator(f)), random_unit_operator(rng, h, h));
    b.family("F", "H", ops, "T");
    b.op("K", k);
    b.check("k-g-frame", "F", "K");
    b.check("k-end-frame", "F", "K");
  } else if (profile == "star-commutative") {
    b.space("G", r);
    const ModuleSpace g(b.inst.algebra, r);
    std::vector<ModuleVector> xs;
    const int m = r + rng.uniform_int(0, 2);
    for (int i = 0; i < m; ++i) xs.push_back(random_vector(rng, h));
    const int n = rng.uniform_int(1, 3);
    std::vector<AdjointableOp> ops;
    for (int i = 0; i < n; ++i) ops.push_back(i == 0 ? random_invertible_operator(rng, h) : random_operator(rng, h, g));
    b.vectors("V", "H", xs);
    b.family("F", "H", ops, "T");
    b.op("K", random_invertible_operator(rng, h));
    b.check("star-frame", "V");
    b.check("star-k-frame", "V", "K");
    b.check("star-g-frame", "F");
    b.check("star-k-g-frame", "F", "K");
    b.check("generalized-end-frame", "F");
    b.check("generalized-k-end-frame", "F", "K");
  } else if (profile == "end-frame") {
    const ModuleSpace g(b.inst.algebra, r + rng.uniform_int(0, 1));
    b.space("G", g.rank());
    const int n = rng.uniform_int(1, 4);
    std::vector<AdjointableOp> ops;
    for (int i = 0; i < n; ++i) ops.push_back(i == 0 ? random_injective_operator(rng, h, g) : random_operator(rng, h, g));
    b.family("F", "H", ops, "T");
    b.op("K", random_invertible_operator(rng, h));
    b.check("end-frame", "F");
    b.check("k-end-frame", "F", "K");
    b.construct("parseval-k", "F");
    b.construct("k-frame-from-frame", "F", "K");
  } else if (profile == "injective-example") {
    const int n = rng.uniform_int(1, 4);
    std::vector<AdjointableOp> ops;
    for (int i = 0; i < n; ++i) {
      const ModuleSpace cod(b.inst.algebra, r + rng.uniform_int(0, 1));
      b.inst.add_space(cod);
      ops.push_back(random_injective_operator(rng, h, cod, rng.uniform(0.5, 2.0)));
    }
    b.family("F", "H", ops, "T");
    for (int i = 0; i < n; ++i) b.check("closed-range", "T" + std::to_string(i));
    b.check("g-frame", "F");
    b.construct("injective-example", "F");
  } else if (profile == "decaying-injective") {
    const ModuleSpace g(b.inst.algebra, r);
    b.space("G", r);
    std::vector<AdjointableOp> ops;
    for (int i = 1; i <= 20; ++i) {
      const AdjointableOp t = random_injective_operator(rng, h, g);
      ops.push_back(scale(t, 1.0 / (i * op_norm(t))));
    }
    b.family("F", "H", ops, "T");
    b.check("g-frame", "F");
    b.construct("injective-example", "F");
  } else {
    throw Error(ErrorKind::UnknownProfile, "unknown profile '" + profile + "'");
  }
  return b.inst;
}

// ---------------------------------------------------------------------------
// Dual-route equivalence suites.

struct SuiteCase {
  Json record;
  bool agrees = true;
  bool bounds_hold = true;
};

OperatorFamily random_suite_family(Rng& rng, const AlgebraSpec& spec, bool degenerate) {
  const ModuleSpace h(spec, rng.uniform_int(1, 3));
  const ModuleSpace g(spec, rng.uniform_int(1, 3));
  const int n = rng.uniform_int(1, 4);
  std::vector<AdjointableOp> ops;
  for (int i = 0; i < n; ++i) ops.push_back(random_operator(rng, h, g));
  if (degenerate) {
    const AdjointableOp p = random_corank_one_projection(rng, h);
    for (auto& t : ops) t = compose(t, p);
  }
  return OperatorFamily(h, std::move(ops));
}

// Half of the K operators are built to make F a K-frame, the rest are random.
AdjointableOp random_suite_k(Rng& rng, const OperatorFamily& f) {
  const ModuleSpace& h = f.domain();
  if (rng.bernoulli(0.5)) return compose(operator_sqrt(frame_operator(f)), random_unit_operator(rng, h, h));
  return random_operator(rng, h, h);
}

Json bounds_of(const FrameReport& r) {
  if (const auto* s = r.scalar_bounds()) return Json{{"lower", s->lower}, {"upper", s->upper}};
  if (const auto* a = r.algebra_bounds()) {
    Json lower = Json::array();
    Json upper = Json::array();
    for (const auto& blk : a->lower_product.blocks()) lower.push_back(blk(0, 0).real());
    for (const auto& blk : a->upper_product.blocks()) upper.push_back(blk(0, 0).real());
    return Json{{"lower", lower}, {"upper", upper}};
  }
  return nullptr;
}

SuiteCase operator_route_case(const FrameReport& r, bool degenerate) {
  SuiteCase c;
  const CrossCheck* cc = r.cross_check ? &*r.cross_check : nullptr;
  c.agrees = cc ? cc->agrees : true;
  c.bounds_hold = cc ? cc->bounds_hold : true;
  const bool certified = cc ? cc->certificate : r.pass;
  c.record = Json{{"degenerate", degenerate},
                  {"certificate", certified ? "pass" : "fail"},
                  {"sampled", cc ? (cc->verdict ? "pass" : "fail") : "skipped"},
                  {"agrees", c.agrees},
                  {"bounds_hold", c.bounds_hold},
                  {"bounds", bounds_of(r)}};
  if (!r.note.empty()) c.record["note"] = r.note;
  return c;
}

SuiteCase run_suite_case(const std::string& suite, std::uint64_t seed, std::size_t suite_index, std::size_t index,
                         bool commutative_only, const RunFlags& flags) {
  Rng rng = Rng::derive(seed, {suite_index, index});
  CheckOptions o;
  o.tol = flags.tol.value_or(o.tol);
  o.eps_strict = flags.eps_strict.value_or(o.eps_strict);
  o.samples = flags.samples.value_or(o.samples);
  o.seed = rng.engine()();
  const bool degenerate = rng.uniform_int(0, 3) == 0;
  const bool needs_commutative = suite != "end-frame" && suite != "k-end-frame";
  const AlgebraSpec spec =
      needs_commutative || commutative_only ? random_commutative_spec(rng, 3) : random_spec(rng, 3, 2);

  if (suite == "star-factorization") {
    const ModuleSpace h(spec, rng.uniform_int(1, 3));
    std::vector<ModuleVector> xs;
    const int m = rng.uniform_int(1, 5);
    const std::optional<AdjointableOp> p =
        degenerate ? std::optional(random_corank_one_projection(rng, h)) : std::nullopt;
    for (int i = 0; i < m; ++i) {
      ModuleVector x = random_vector(rng, h);
      xs.push_back(p ? apply(*p, x) : x);
    }
    const VectorFamily v(h, xs);
    const FrameReport star = check_star_frame_commutative(v, o);
    const FrameReport scalar = check_vector_frame(v, o.tol);
    SuiteCase c;
    c.agrees = star.pass == scalar.pass;
    Json rec{{"degenerate", degenerate},
             {"certificate", star.pass ? "pass" : "fail"},
             {"scalar_route", scalar.pass ? "pass" : "fail"}};
    if (const auto* b = star.algebra_bounds()) {
      const double fact = std::max(max_abs_diff(b->lower * involution(b->lower), b->lower_product),
                                   max_abs_diff(b->upper * involution(b->upper), b->upper_product));
      const FrameReport sampled = check_star_sampled(v, std::nullopt, b->lower, b->upper, o);
      c.bounds_hold = fact <= 1e-10 && sampled.pass && b->strictly_positive;
      rec["factorization_defect"] = fact;
      rec["sampled"] = sampled.pass ? "pass" : "fail";
    } else {
      c.agrees = c.agrees && star.witness.has_value();
    }
    rec["agrees"] = c.agrees;
    rec["bounds_hold"] = c.bounds_hold;
    rec["bounds"] = bounds_of(star);
    c.record = std::move(rec);
    return c;
  }
  const OperatorFamily f = random_suite_family(rng, spec, degenerate);
  if (suite == "end-frame") return operator_route_case(check_end_frame(f, o), degenerate);
  if (suite == "generalized-end-frame") return operator_route_case(check_generalized_end_frame(f, o), degenerate);
  const AdjointableOp k = random_suite_k(rng, f);
  if (suite == "k-end-frame") return operator_route_case(check_k_end_frame(f, k, o), degenerate);
  return operator_route_case(check_generalized_k_end_frame(f, k, o), degenerate);
}

bool commutative_suite(const std::string& s) { return s != "end-frame" && s != "k-end-frame"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& profiles() {
  static const std::vector<std::string> names{"g-frame",   "k-frame",           "star-commutative",
                                              "end-frame", "injective-example", "decaying-injective"};
  return names;
}

Instance cmd_gen(std::uint64_t seed, const std::string& profile) {
  Instance inst = generate(seed, profile);
  validate(inst);
  return inst;
}

RunReport cmd_check(const Instance& inst, const RunFlags& flags) {
  return run_requests("check", inst, inst.requests, flags);
}

RunReport cmd_construct(const Instance& inst, const ConstructArgs& args, const RunFlags& flags) {
  Instance copy = inst;
  Request r;
  r.construction = true;
  r.action = args.construction;
  r.target = args.family;
  r.k = args.k;
  r.k2 = args.k2;
  r.n = args.n;
  copy.requests = {r};
  validate(copy);
  return run_requests("construct", copy, copy.requests, flags);
}

const std::vector<std::string>& theorem_suites() {
  static const std::vector<std::string> names{"star-factorization", "end-frame", "k-end-frame",
                                              "generalized-end-frame", "generalized-k-end-frame"};
  return names;
}

RunReport cmd_verify_theorems(const VerifyOptions& opts) {
  if (opts.count < 1) throw Error(ErrorKind::ValidationError, "count must be >= 1");
  std::vector<std::pair<std::size_t, std::string>> suites;
  const auto& all = theorem_suites();
  for (std::size_t s = 0; s < all.size(); ++s) {
    const bool selected =
        opts.suites.empty() || std::find(opts.suites.begin(), opts.suites.end(), all[s]) != opts.suites.end();
    if (selected && (!opts.commutative_only || commutative_suite(all[s]))) suites.emplace_back(s, all[s]);
  }
  for (const auto& name : opts.suites) {
    if (std::find(all.begin(), all.end(), name) == all.end()) {
      throw Error(ErrorKind::ValidationError, "unknown suite '" + name + "'");
    }
  }

  const std::size_t total = suites.size() * opts.count;
  const std::vector<Json> cases = parallel_map(total, opts.flags.parallel, [&](std::size_t t) {
    const auto& [suite_index, name] = suites[t / opts.count];
    const std::size_t index = t % opts.count;
    Json rec{{"index", index}};
    try {
      SuiteCase c = run_suite_case(name, opts.seed, suite_index, index, opts.commutative_only, opts.flags);
      for (auto& [key, value] : c.record.items()) rec[key] = value;
    } catch (const Error& e) {
      rec["agrees"] = false;
      rec["bounds_hold"] = false;
      const Json ej = error_json(e);
      for (auto& [key, value] : ej.items()) rec[key] = value;
    }
    return rec;
  });

  Json report = header("verify-theorems", opts.seed);
  report["count"] = opts.count;
  report["commutative_only"] = opts.commutative_only;
  Json suite_list = Json::array();
  std::size_t disagreements = 0;
  std::size_t violations = 0;
  for (std::size_t s = 0; s < suites.size(); ++s) {
    Json instances = Json::array();
    std::size_t d = 0;
    std::size_t v = 0;
    for (std::size_t i = 0; i < opts.count; ++i) {
      const Json& rec = cases[s * opts.count + i];
      d += rec["agrees"].get<bool>() ? 0 : 1;
      v += rec["bounds_hold"].get<bool>() ? 0 : 1;
      instances.push_back(rec);
    }
    disagreements += d;
    violations += v;
    suite_list.push_back(Json{{"name", suites[s].second},
                              {"instances", std::move(instances)},
                              {"disagreements", d},
                              {"bound_violations", v}});
  }
  report["suites"] = std::move(suite_list);
  report["summary"] = Json{{"instances", total}, {"disagreements", disagreements}, {"bound_violations", violations}};
  const bool ok = disagreements == 0 && violations == 0;
  report["status"] = ok ? "pass" : "fail";
  return {std::move(report), ok ? 0 : 1};
}

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frame checks and constructions over finite-dimensional C*-algebras", "cstarframe"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  RunFlags flags;
  std::string out_path;
  bool timing = false;
  double tol = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--tol", tol, "PSD / positivity tolerance (default 1e-9)")->check(CLI::PositiveNumber);
    sub->add_option("--eps-strict", eps, "strict positivity margin (default 1e-8)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--samples", samples, "sampled vectors / operators per check (default 200)");
    sub->add_option("--out", out_path, "write the JSON report here instead of stdout");
    sub->add_option("--parallel", flags.parallel, "worker threads (default 1)")->check(CLI::Range(1, 256));
    sub->add_flag("--timing", timing, "print elapsed time to stderr");
  };

  std::string profile;
  auto* gen = app.add_subcommand("gen", "generate a random instance");
  gen->add_option("profile", profile, "instance profile")->required()->check(CLI::IsMember(profiles()));
  common(gen);

  std::string instance_path;
  auto* check = app.add_subcommand("check", "run the checks requested by an instance");
  check->add_option("instance", instance_path, "instance JSON file")->required();
  common(check);

  ConstructArgs cargs;
  std::optional<std::string> k_name;
  std::optional<std::string> k2_name;
  std::optional<int> n_value;
  auto* construct = app.add_subcommand("construct", "run one construction on an instance family");
  construct->add_option("instance", instance_path, "instance JSON file")->required();
  construct->add_option("construction", cargs.construction, "construction name")->required();
  construct->add_option("--family", cargs.family, "family name")->required();
  construct->add_option("--k", k_name, "K operator name");
  construct->add_option("--k2", k2_name, "K2 operator name");
  construct->add_option("--n", n_value, "power for power-k");
  common(construct);

  VerifyOptions vopts;
  std::size_t count = 10;
  auto* verify = app.add_subcommand("verify-theorems", "cross-validate both routes of every equivalence");
  verify->add_option("--count", count, "instances per suite")->check(CLI::PositiveNumber);
  verify->add_option("--suites", vopts.suites, "comma separated suite names")->delimiter(',');
  verify->add_flag("--commutative-only", vopts.commutative_only, "run only the commutative suites");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  auto* active = app.get_subcommands().front();
  if (active->count("--tol")) flags.tol = tol;
  if (active->count("--eps-strict")) flags.eps_strict = eps;
  if (active->count("--seed")) flags.seed = seed;
  if (active->count("--samples")) flags.samples = samples;

  const auto started = std::chrono::steady_clock::now();
  auto emit = [&](const Json& j) {
    const std::string textual = dump(j);
    if (out_path.empty()) {
      out << textual;
    } else {
      std::ofstream file(out_path, std::ios::binary);
      if (!file) throw Error(ErrorKind::ValidationError, "cannot write '" + out_path + "'");
      file << textual;
    }
    if (timing) {
      const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
      err << "elapsed_ms " << ms << "\n";
    }
  };

  try {
    if (active == gen) {
      emit(instance_to_json(cmd_gen(flags.seed.value_or(0), profile)));
      return 0;
    }
    if (active == verify) {
      vopts.seed = flags.seed.value_or(0);
      vopts.count = count;
      vopts.flags = flags;
      RunReport r = cmd_verify_theorems(vopts);
      emit(r.report);
      return r.status;
    }
    const Instance inst = instance_from_json(parse_text(read_file(instance_path)));
    if (active == check) {
      RunReport r = cmd_check(inst, flags);
      emit(r.report);
      return r.status;
    }
    cargs.k = k_name;
    cargs.k2 = k2_name;
    cargs.n = n_value;
    RunReport r = cmd_construct(inst, cargs, flags);
    emit(r.report);
    return r.status;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::ValidationError ||
                   e.kind() == ErrorKind::UnknownProfile
               ? 2
               : 1;
  }
}

}  // namespace csf
