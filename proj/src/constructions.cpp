#include "cstarframe/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cstarframe/errors.hpp"
#include "cstarframe/random.hpp"

namespace csf {

namespace {

constexpr std::uint64_t kParsevalSampleStream = 0x5041'5253;  // "PARS"
constexpr double kIdentityTol = 1e-9;
constexpr double kLiftTol = 1e-10;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

NamedCheck check(std::string name, bool pass, std::string detail = {}) {
  return {std::move(name), pass, std::move(detail)};
}

void finish(ConstructionCertificate& c) {
  c.pass = c.output.pass && std::all_of(c.checks.begin(), c.checks.end(), [](const NamedCheck& n) { return n.pass; });
}

ScalarBounds require_scalar_pass(const FrameReport& r, const char* what) {
  const auto* b = r.scalar_bounds();
  if (!r.pass || !b) throw Error(ErrorKind::NotAFrame, std::string("input is not ") + what);
  return *b;
}

void require_endomorphism_of(const ModuleSpace& h, const AdjointableOp& k) {
  if (!k.is_endomorphism() || !(k.domain() == h)) {
    throw Error(ErrorKind::ShapeMismatch, "K must be an endomorphism of the family's domain");
  }
}

OperatorFamily compose_members(const OperatorFamily& f, const AdjointableOp& right) {
  std::vector<AdjointableOp> members;
  members.reserve(f.size());
  for (const auto& t : f.members()) members.push_back(compose(t, right));
  return OperatorFamily(f.domain(), std::move(members));
}

// Validity of C P <= S <= D I, plus the checker's optimal bounds against the
// predicted pair.
void bound_checks(ConstructionCertificate& c, const OperatorFamily& out, const AdjointableOp& p, double lower,
                  double upper, const CheckOptions& opts) {
  const AdjointableOp s = frame_operator(out);
  const double scale_tol = opts.tol * std::max(1.0, upper);
  c.checks.push_back(check("predicted lower bound holds", is_psd_order(scale(p, lower), s, scale_tol),
                           "C = " + fmt(lower)));
  c.checks.push_back(check("predicted upper bound holds",
                           is_psd_order(s, scale(AdjointableOp::identity(out.domain()), upper), scale_tol),
                           "D = " + fmt(upper)));
  if (const auto* b = c.output.scalar_bounds()) {
    c.checks.push_back(check("optimal lower >= predicted", b->lower >= lower * (1.0 - kBisectionWidth) - opts.tol,
                             "optimal " + fmt(b->lower)));
    c.checks.push_back(check("optimal upper <= predicted", b->upper <= upper * (1.0 + 1e-12) + opts.tol,
                             "optimal " + fmt(b->upper)));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

FamilyConstruction direct_sum_lift(const OperatorFamily& f, const std::optional<AdjointableOp>& k,
                                   const CheckOptions& opts) {
  std::vector<ModuleSpace> codomains;
  for (const auto& t : f.members()) codomains.push_back(t.codomain());
  const DirectSum sum(codomains);

  std::vector<AdjointableOp> lifted;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const ModuleSpace& part = codomains[i];
    std::vector<AlgebraElement> entries;
    for (int r = 0; r < part.rank(); ++r) {
      for (int q = 0; q < sum.total().rank(); ++q) {
        entries.push_back(q == sum.offset(i) + r ? AlgebraElement::identity(part.spec())
                                                 : AlgebraElement::zero(part.spec()));
      }
    }
    const AdjointableOp inject(part, sum.total(), std::move(entries));
    lifted.push_back(compose(inject, f[i]));
  }
  OperatorFamily out(f.domain(), std::move(lifted));

  ConstructionCertificate c;
  c.construction = "direct-sum-lift";
  c.input = check_g_frame(f, opts.tol);
  c.output = check_g_frame(out, opts.tol);
  c.predicted = c.input.bounds;

  const AdjointableOp s_in = frame_operator(f);
  const AdjointableOp s_out = frame_operator(out);
  const double diff = max_abs_diff(s_in, s_out);
  c.checks.push_back(check("frame operator preserved", diff <= 1e-12 * std::max(1.0, op_norm(s_in)),
                           "max difference " + fmt(diff)));

  auto compare = [&](const std::string& flavor, const FrameReport& a, const FrameReport& b) {
    bool same = a.pass == b.pass;
    std::string detail;
    if (const auto* sa = a.scalar_bounds(); sa && b.scalar_bounds()) {
      const auto* sb = b.scalar_bounds();
      same = same && close(sb->lower, sa->lower, kLiftTol) && close(sb->upper, sa->upper, kLiftTol);
      detail = "lower " + fmt(sa->lower) + " / " + fmt(sb->lower) + ", upper " + fmt(sa->upper) + " / " +
               fmt(sb->upper);
    } else if (const auto* aa = a.algebra_bounds(); aa && b.algebra_bounds()) {
      const auto* ab = b.algebra_bounds();
      const double scale_tol = kLiftTol * std::max(1.0, norm(aa->upper_product));
      same = same && max_abs_diff(aa->lower_product, ab->lower_product) <= scale_tol &&
             max_abs_diff(aa->upper_product, ab->upper_product) <= scale_tol;
    } else {
      same = same && a.bounds.index() == b.bounds.index();
    }
    c.checks.push_back(check(flavor + " bounds preserved", same, detail));
  };

  compare("g-frame", c.input, c.output);
  const bool commutative = f.domain().spec().is_commutative();
  if (commutative) compare("star-g-frame", check_star_g_frame_commutative(f, opts), check_star_g_frame_commutative(out, opts));
  if (k) {
    compare("k-g-frame", check_k_g_frame(f, *k, opts.tol), check_k_g_frame(out, *k, opts.tol));
    if (commutative) {
      compare("star-k-g-frame", check_star_k_g_frame_commutative(f, *k, opts),
              check_star_k_g_frame_commutative(out, *k, opts));
    }
  }
  // The lift is an equivalence: the certificate holds whenever the verdicts
  // and bounds coincide, whether or not the input is a frame.
  c.pass = std::all_of(c.checks.begin(), c.checks.end(), [](const NamedCheck& n) { return n.pass; });
  return {std::move(out), std::move(c)};
}

OperatorConstruction parseval_k_from_family(const OperatorFamily& f, const CheckOptions& opts) {
  if (!f.common_codomain()) throw Error(ErrorKind::ShapeMismatch, "members must share a codomain");
  const AdjointableOp s = frame_operator(f);
  AdjointableOp k = operator_sqrt(s, opts.tol);

  ConstructionCertificate c;
  c.construction = "parseval-k";
  c.input = check_g_frame(f, opts.tol);
  c.predicted = ScalarBounds{1.0, spectrum(s).max};
  c.output = check_k_end_frame(f, k, opts);

  const double s_norm = op_norm(s);
  const double defect = op_norm(subtract(compose(k, adjoint(k)), s));
  c.checks.push_back(check("K K* equals the frame operator", defect <= kIdentityTol * std::max(1.0, s_norm),
                           "defect " + fmt(defect)));
  const auto* b = c.output.scalar_bounds();
  c.checks.push_back(check("tight with constant 1", c.output.tight && b && std::abs(b->lower - 1.0) <= kTightTol,
                           b ? "lower " + fmt(b->lower) : "no bounds"));

  Rng rng = Rng::derive(opts.seed, {kParsevalSampleStream});
  const ModuleSpace cod = *f.common_codomain();
  double worst = 0.0;
  for (std::size_t i = 0; i < opts.samples; ++i) {
    const AdjointableOp t = random_unit_operator(rng, f.domain(), cod);
    const AdjointableOp tk = compose(t, k);
    worst = std::max(worst, max_abs_diff(operator_inner(tk, tk), operator_frame_sum(f, t)));
  }
  c.checks.push_back(check("sampled Parseval identity", worst <= kIdentityTol * std::max(1.0, s_norm),
                           "max difference " + fmt(worst) + " over " + std::to_string(opts.samples) + " samples"));
  finish(c);
  return {std::move(k), std::move(c)};
}

FamilyConstruction k_frame_from_frame(const OperatorFamily& f, const AdjointableOp& k, const CheckOptions& opts) {
  require_endomorphism_of(f.domain(), k);
  ConstructionCertificate c;
  c.construction = "k-frame-from-frame";
  c.input = check_end_frame(f, opts);
  const ScalarBounds in = require_scalar_pass(c.input, "an end-frame");
  const double k_norm = op_norm(k);
  const ScalarBounds predicted{in.lower, in.upper * k_norm * k_norm};
  c.predicted = predicted;

  OperatorFamily out = compose_members(f, adjoint(k));
  c.output = check_k_end_frame(out, k, opts);
  bound_checks(c, out, compose(k, adjoint(k)), predicted.lower, predicted.upper, opts);
  finish(c);
  return {std::move(out), std::move(c)};
}

FamilyConstruction k2k1_frame(const OperatorFamily& f, const AdjointableOp& k1, const AdjointableOp& k2,
                              const CheckOptions& opts) {
  require_endomorphism_of(f.domain(), k1);
  require_endomorphism_of(f.domain(), k2);
  ConstructionCertificate c;
  c.construction = "k2k1";
  c.input = check_k_end_frame(f, k1, opts);
  const ScalarBounds in = require_scalar_pass(c.input, "a K1-frame");
  const double k2_norm = op_norm(k2);
  const ScalarBounds predicted{in.lower, in.upper * k2_norm * k2_norm};
  c.predicted = predicted;

  OperatorFamily out = compose_members(f, adjoint(k2));
  const AdjointableOp k21 = compose(k2, k1);
  c.output = check_k_end_frame(out, k21, opts);
  bound_checks(c, out, compose(k21, adjoint(k21)), predicted.lower, predicted.upper, opts);
  finish(c);
  return {std::move(out), std::move(c)};
}

FamilyConstruction power_k_frame(const OperatorFamily& f, const AdjointableOp& k, int n, const CheckOptions& opts) {
  if (n < 0) throw Error(ErrorKind::ValidationError, "power must be >= 0");
  require_endomorphism_of(f.domain(), k);
  ConstructionCertificate c;
  c.construction = "power-k";
  c.input = check_k_end_frame(f, k, opts);
  const ScalarBounds in = require_scalar_pass(c.input, "a K-frame");
  const double k_norm = op_norm(k);
  const ScalarBounds predicted{in.lower, in.upper * std::pow(k_norm, 2.0 * n)};
  c.predicted = predicted;

  OperatorFamily current = f;
  AdjointableOp k_current = k;
  for (int step = 0; step < n; ++step) {
    FamilyConstruction next = k2k1_frame(current, k_current, k, opts);
    c.checks.push_back(check("step " + std::to_string(step + 1), next.certificate.pass));
    current = std::move(next.family);
    k_current = compose(k, k_current);
  }
  c.output = n == 0 ? c.input : check_k_end_frame(current, k_current, opts);
  bound_checks(c, current, compose(k_current, adjoint(k_current)), predicted.lower, predicted.upper, opts);
  finish(c);
  return {std::move(current), std::move(c)};
}

ConstructionCertificate surjective_demotion(const OperatorFamily& f, const AdjointableOp& k, const CheckOptions& opts) {
  require_endomorphism_of(f.domain(), k);
  const ClosedRangeBounds sb = surjectivity_bounds(k);
  if (!sb.injective_closed_range) throw Error(ErrorKind::NotSurjective, "K is not surjective");
  ConstructionCertificate c;
  c.construction = "surjective-demotion";
  c.input = check_k_end_frame(f, k, opts);
  const ScalarBounds in = require_scalar_pass(c.input, "a K-frame");
  const ScalarBounds predicted{in.lower * sb.lower, in.upper};
  c.predicted = predicted;
  c.output = check_end_frame(f, opts);
  bound_checks(c, f, AdjointableOp::identity(f.domain()), predicted.lower, predicted.upper, opts);
  finish(c);
  return c;
}

FamilyConstruction example_frame_injective(const std::vector<AdjointableOp>& ops, const CheckOptions& opts) {
  if (ops.empty()) throw Error(ErrorKind::EmptyFamily, "no operators given");
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const ClosedRangeBounds cr = closed_range_bounds(ops[i]);
    if (!cr.injective_closed_range) {
      throw Error(ErrorKind::NotInjectiveClosedRange,
                  "member " + std::to_string(i) + " is not injective with closed range");
    }
    lower += cr.lower;
    upper += cr.upper;
  }
  OperatorFamily out(ops.front().domain(), ops);

  ConstructionCertificate c;
  c.construction = "injective-example";
  c.predicted = ScalarBounds{lower, upper};
  c.output = check_g_frame(out, opts.tol);
  c.input = c.output;
  const Spectrum sp = spectrum(frame_operator(out));
  const double scale_tol = opts.tol * std::max(1.0, upper);
  c.checks.push_back(check("lower <= lambda_min(S)", lower <= sp.min + scale_tol,
                           fmt(lower) + " vs " + fmt(sp.min)));
  c.checks.push_back(check("lambda_max(S) <= upper", sp.max <= upper + scale_tol, fmt(sp.max) + " vs " + fmt(upper)));
  bound_checks(c, out, AdjointableOp::identity(out.domain()), lower, upper, opts);
  finish(c);
  return {std::move(out), std::move(c)};
}

ConstructionCertificate frame_as_k_frame(const OperatorFamily& f, const AdjointableOp& k, const CheckOptions& opts) {
  require_endomorphism_of(f.domain(), k);
  const double k_norm = op_norm(k);
  if (k_norm <= opts.tol) throw Error(ErrorKind::ValidationError, "K must be nonzero");
  ConstructionCertificate c;
  c.construction = "frame-as-k-frame";
  c.input = check_end_frame(f, opts);
  const ScalarBounds in = require_scalar_pass(c.input, "an end-frame");
  const ScalarBounds predicted{in.lower / std::max(1.0, k_norm * k_norm), in.upper};
  c.predicted = predicted;
  c.output = check_k_end_frame(f, k, opts);
  bound_checks(c, f, compose(k, adjoint(k)), predicted.lower, predicted.upper, opts);
  finish(c);
  return c;
}

}  // namespace csf
