#include "cstarframe/frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cstarframe/errors.hpp"
#include "cstarframe/random.hpp"

namespace csf {

OperatorFamily::OperatorFamily(ModuleSpace domain, std::vector<AdjointableOp> members)
    : domain_(std::move(domain)), members_(std::move(members)) {
  if (members_.empty()) throw Error(ErrorKind::EmptyFamily, "operator family has no members");
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (!(members_[i].domain() == domain_)) {
      throw Error(ErrorKind::SpaceMismatch, "member " + std::to_string(i) + " has a different domain");
    }
  }
}

std::optional<ModuleSpace> OperatorFamily::common_codomain() const {
  const ModuleSpace& first = members_.front().codomain();
  for (const auto& m : members_) {
    if (!(m.codomain() == first)) return std::nullopt;
  }
  return first;
}

VectorFamily::VectorFamily(ModuleSpace space, std::vector<ModuleVector> members)
    : space_(std::move(space)), members_(std::move(members)) {
  if (members_.empty()) throw Error(ErrorKind::EmptyFamily, "vector family has no members");
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (!(members_[i].space() == space_)) {
      throw Error(ErrorKind::SpaceMismatch, "member " + std::to_string(i) + " lives in a different space");
    }
  }
}

OperatorFamily to_functionals(const VectorFamily& v) {
  std::vector<AdjointableOp> ops;
  ops.reserve(v.size());
  for (const auto& x : v.members()) ops.push_back(functional(x));
  return OperatorFamily(v.space(), std::move(ops));
}

AdjointableOp frame_operator(const OperatorFamily& f) {
  AdjointableOp s = AdjointableOp::zero(f.domain(), f.domain());
  for (const auto& t : f.members()) s = add(s, compose(adjoint(t), t));
  return s;
}

std::string_view to_string(FrameKind kind) noexcept {
  switch (kind) {
    case FrameKind::GFrame: return "g-frame";
    case FrameKind::VectorFrame: return "vector-frame";
    case FrameKind::KGFrame: return "k-g-frame";
    case FrameKind::StarFrame: return "star-frame";
    case FrameKind::StarGFrame: return "star-g-frame";
    case FrameKind::StarKFrame: return "star-k-frame";
    case FrameKind::StarKGFrame: return "star-k-g-frame";
    case FrameKind::StarSampled: return "star-sampled";
    case FrameKind::EndFrame: return "end-frame";
    case FrameKind::KEndFrame: return "k-end-frame";
    case FrameKind::GeneralizedEndFrame: return "generalized-end-frame";
    case FrameKind::GeneralizedKEndFrame: return "generalized-k-end-frame";
  }
  return "unknown";
}

std::string_view to_string(Side side) noexcept { return side == Side::Lower ? "lower" : "upper"; }

namespace {

constexpr std::uint64_t kStarSampleStream = 0x5354'4152;     // "STAR"
constexpr std::uint64_t kOperatorSampleStream = 0x454e'4446;  // "ENDF"

bool is_tight(double lower, double upper) { return std::abs(lower - upper) <= kTightTol * std::max(1.0, upper); }

bool is_parseval(double lower, double upper) {
  return is_tight(lower, upper) && std::abs(lower - 1.0) <= kTightTol && std::abs(upper - 1.0) <= kTightTol;
}

double lambda_max(const std::vector<Matrix>& blocks) {
  double out = 0.0;
  for (const auto& b : blocks) {
    if (b.size() == 0) continue;
    const auto eig = hermitian_eig(b);
    out = std::max(out, eig.values(eig.values.size() - 1));
  }
  return out;
}

struct BlockSpectrum {
  double min = 0.0;
  double max = 0.0;
  Vector min_vector;
};

BlockSpectrum block_spectrum(const Matrix& b) {
  const auto eig = hermitian_eig(b);
  return {eig.values(0), eig.values(eig.values.size() - 1), eig.vectors.col(0)};
}

void require_commutative(const ModuleSpace& space) {
  if (!space.spec().is_commutative()) {
    throw Error(ErrorKind::NotCommutative, "algebra-valued bounds are certified for commutative algebras only");
  }
}

void require_k(const OperatorFamily& f, const AdjointableOp& k) {
  if (!k.is_endomorphism() || !(k.domain() == f.domain())) {
    throw Error(ErrorKind::ShapeMismatch, "K must be an endomorphism of the family's domain");
  }
}

ModuleSpace require_common_codomain(const OperatorFamily& f) {
  auto cod = f.common_codomain();
  if (!cod) throw Error(ErrorKind::ShapeMismatch, "operator-module frames need a common codomain");
  return *cod;
}

Witness vector_witness(const ModuleSpace& space, std::size_t block, const Vector& v, double value,
                       double threshold, std::string detail) {
  Witness w;
  w.side = Side::Lower;
  w.vector = vector_from_row(space, block, v);
  w.value = value;
  w.threshold = threshold;
  w.detail = std::move(detail);
  return w;
}

}  // namespace

// ---------------------------------------------------------------------------

PencilBound pencil_lower_bound(const std::vector<Matrix>& s, const std::vector<Matrix>& p, double tol) {
  PencilBound out;
  const double s_max = lambda_max(s);
  const double p_max = lambda_max(p);
  if (p_max <= tol) {
    out.degenerate = true;
    return out;
  }
  double p_min_plus = std::numeric_limits<double>::infinity();
  for (const auto& b : p) {
    const auto eig = hermitian_eig(b);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      if (eig.values(i) > 1e-12 * p_max) p_min_plus = std::min(p_min_plus, eig.values(i));
    }
  }

  // Most negative eigenvalue of S - cP over all blocks, with its vector.
  auto probe = [&](double c) {
    PsdProbe pr;
    pr.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s.size(); ++j) {
      const auto eig = hermitian_eig(s[j] - c * p[j]);
      if (eig.values(0) < pr.min_eigenvalue) {
        pr.min_eigenvalue = eig.values(0);
        pr.block = j;
        pr.eigenvector = eig.vectors.col(0);
      }
    }
    return pr;
  };
  auto feasible = [&](double c, const PsdProbe& pr) {
    return pr.min_eigenvalue >= -1e-12 * std::max(1.0, s_max + c * p_max);
  };

  double lo = 0.0;
  double hi = s_max / std::max(p_min_plus, std::numeric_limits<double>::min());
  PsdProbe at_hi = probe(hi);
  if (feasible(hi, at_hi)) {
    lo = hi;
    // The witness matters only when this bound is ~0, i.e. S vanishes; the
    // top direction of P then defeats every positive constant.
    double best = -1.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const auto eig = hermitian_eig(p[j]);
      const Eigen::Index last = eig.values.size() - 1;
      if (eig.values(last) > best) {
        best = eig.values(last);
        out.witness_block = j;
        out.witness = eig.vectors.col(last);
      }
    }
    out.infeasible = hi;
  } else {
    for (int iter = 0; iter < kBisectionMaxIter && hi - lo > kBisectionWidth * hi; ++iter) {
      const double mid = 0.5 * (lo + hi);
      PsdProbe pr = probe(mid);
      if (feasible(mid, pr)) {
        lo = mid;
      } else {
        hi = mid;
        at_hi = std::move(pr);
      }
    }
    out.infeasible = hi;
    out.witness_block = at_hi.block;
    out.witness = at_hi.eigenvector;
  }
  out.value = lo;

  // Tightness: least-squares fit S ~ c P and its residual.
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    num += (p[j].adjoint() * s[j]).trace().real();
    den += p[j].squaredNorm();
  }
  const double c_fit = num / den;
  double residual = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) residual = std::max(residual, spectral_norm(s[j] - c_fit * p[j]));
  if (c_fit > 0.0 && residual <= tol) {
    out.tight = true;
    out.value = c_fit;
  }
  return out;
}

PencilExtremes pencil_extremes(const Matrix& m, const Matrix& n) {
  PencilExtremes out;
  const auto eig_n = hermitian_eig(n);
  const double n_max = eig_n.values(eig_n.values.size() - 1);
  if (n_max <= 0.0) return out;
  std::vector<Eigen::Index> range;
  std::vector<Eigen::Index> kernel;
  for (Eigen::Index i = 0; i < eig_n.values.size(); ++i) {
    (eig_n.values(i) > 1e-10 * n_max ? range : kernel).push_back(i);
  }
  const Eigen::Index dim = n.rows();
  Matrix y(dim, static_cast<Eigen::Index>(range.size()));
  RealVector inv_sqrt(static_cast<Eigen::Index>(range.size()));
  for (std::size_t c = 0; c < range.size(); ++c) {
    y.col(c) = eig_n.vectors.col(range[c]);
    inv_sqrt(c) = 1.0 / std::sqrt(eig_n.values(range[c]));
  }
  const Matrix m_yy = y.adjoint() * m * y;
  Matrix schur = m_yy;
  bool unbounded = false;
  if (!kernel.empty()) {
    Matrix z(dim, static_cast<Eigen::Index>(kernel.size()));
    for (std::size_t c = 0; c < kernel.size(); ++c) z.col(c) = eig_n.vectors.col(kernel[c]);
    const Matrix m_yz = y.adjoint() * m * z;
    const auto eig_zz = hermitian_eig(z.adjoint() * m * z);
    const double zz_max = eig_zz.values(eig_zz.values.size() - 1);
    const double m_scale = std::max(1.0, max_abs(m));
    if (zz_max > 1e-10 * m_scale) {
      unbounded = true;
      Matrix pinv = Matrix::Zero(z.cols(), z.cols());
      for (Eigen::Index i = 0; i < eig_zz.values.size(); ++i) {
        if (eig_zz.values(i) > 1e-10 * m_scale) {
          pinv += (1.0 / eig_zz.values(i)) * eig_zz.vectors.col(i) * eig_zz.vectors.col(i).adjoint();
        }
      }
      schur -= m_yz * pinv * m_yz.adjoint();
    }
  }
  const auto d = inv_sqrt.cast<Complex>().asDiagonal();
  const Matrix low = d * schur * d;
  const Matrix high = d * m_yy * d;
  out.empty = false;
  out.min = hermitian_eig(low).values(0);
  out.max = unbounded ? std::numeric_limits<double>::infinity() : block_spectrum(high).max;
  return out;
}

AdjointableOp operator_frame_sum(const OperatorFamily& f, const AdjointableOp& t) {
  const ModuleSpace& cod = t.codomain();
  AdjointableOp sum = AdjointableOp::zero(cod, cod);
  const AdjointableOp t_star = adjoint(t);
  for (const auto& ti : f.members()) {
    const AdjointableOp left = compose(t, adjoint(ti));  // <T, T_i>
    const AdjointableOp right = compose(ti, t_star);     // <T_i, T>
    sum = add(sum, compose(left, right));
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Scalar checks.

FrameReport check_g_frame(const OperatorFamily& f, double tol) {
  const Realization s = realize(frame_operator(f));
  double lower = std::numeric_limits<double>::infinity();
  double upper = 0.0;
  std::size_t min_block = 0;
  Vector min_vector;
  for (std::size_t j = 0; j < s.blocks.size(); ++j) {
    auto bs = block_spectrum(s.blocks[j]);
    if (bs.min < lower) {
      lower = bs.min;
      min_block = j;
      min_vector = std::move(bs.min_vector);
    }
    upper = std::max(upper, bs.max);
  }
  FrameReport r;
  r.kind = FrameKind::GFrame;
  r.pass = lower > tol;
  if (r.pass) {
    r.bounds = ScalarBounds{lower, upper};
    r.tight = is_tight(lower, upper);
    r.parseval = is_parseval(lower, upper);
  } else {
    r.witness = vector_witness(f.domain(), min_block, min_vector, lower, tol,
                               "frame operator has eigenvalue " + std::to_string(lower) + " <= tol");
  }
  return r;
}

FrameReport check_vector_frame(const VectorFamily& v, double tol) {
  FrameReport r = check_g_frame(to_functionals(v), tol);
  r.kind = FrameKind::VectorFrame;
  return r;
}

FrameReport check_k_g_frame(const OperatorFamily& f, const AdjointableOp& k, double tol) {
  require_k(f, k);
  const Realization s = realize(frame_operator(f));
  const Realization p = realize(compose(k, adjoint(k)));
  FrameReport r;
  r.kind = FrameKind::KGFrame;
  const PencilBound pb = pencil_lower_bound(s.blocks, p.blocks, tol);
  if (pb.degenerate) {
    r.pass = false;
    Witness w;
    w.op = k;
    w.detail = "K is zero; a K-frame needs K != 0";
    r.witness = std::move(w);
    r.note = "degenerate K";
    return r;
  }
  const double upper = lambda_max(s.blocks);
  r.pass = pb.value > tol;
  if (r.pass) {
    r.bounds = ScalarBounds{pb.value, upper};
    r.tight = pb.tight;
    r.parseval = pb.tight && std::abs(pb.value - 1.0) <= kTightTol;
  } else {
    const Vector& v = pb.witness;
    const double num = (v.adjoint() * s.blocks[pb.witness_block] * v)(0).real();
    const double den = (v.adjoint() * p.blocks[pb.witness_block] * v)(0).real();
    r.witness = vector_witness(f.domain(), pb.witness_block, v, den > 0.0 ? num / den : 0.0, pb.infeasible,
                               "S - c KK* is indefinite at c = " + std::to_string(pb.infeasible));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Commutative algebra-valued checks.

namespace {

FrameReport star_report(FrameKind kind, const ModuleSpace& space, const std::vector<double>& lower,
                        const std::vector<double>& upper, const CheckOptions& opts) {
  FrameReport r;
  r.kind = kind;
  r.pass = std::all_of(lower.begin(), lower.end(), [&](double l) { return l > opts.tol; });
  if (!r.pass) return r;
  const AlgebraSpec& spec = space.spec();
  std::vector<double> lower_root;
  std::vector<double> upper_root;
  bool tight = true;
  bool parseval = true;
  for (std::size_t j = 0; j < lower.size(); ++j) {
    lower_root.push_back(std::sqrt(lower[j]));
    upper_root.push_back(std::sqrt(upper[j]));
    tight = tight && is_tight(lower[j], upper[j]);
    parseval = parseval && is_parseval(lower[j], upper[j]);
  }
  AlgebraBounds b{AlgebraElement::diagonal(spec, lower_root), AlgebraElement::diagonal(spec, upper_root),
                  AlgebraElement::diagonal(spec, lower), AlgebraElement::diagonal(spec, upper), false};
  b.strictly_positive = is_strictly_positive(b.lower_product, opts.eps_strict) &&
                        is_strictly_positive(b.upper_product, opts.eps_strict);
  r.bounds = std::move(b);
  r.tight = tight;
  r.parseval = parseval;
  return r;
}

FrameReport star_g(FrameKind kind, const OperatorFamily& f, const CheckOptions& opts) {
  require_commutative(f.domain());
  const Realization s = realize(frame_operator(f));
  std::vector<double> lower;
  std::vector<double> upper;
  std::optional<Witness> witness;
  for (std::size_t j = 0; j < s.blocks.size(); ++j) {
    const auto bs = block_spectrum(s.blocks[j]);
    lower.push_back(bs.min);
    upper.push_back(bs.max);
    if (bs.min <= opts.tol && !witness) {
      witness = vector_witness(f.domain(), j, bs.min_vector, bs.min, opts.tol,
                               "coordinate " + std::to_string(j) + " has lower constant <= tol");
    }
  }
  FrameReport r = star_report(kind, f.domain(), lower, upper, opts);
  if (!r.pass) r.witness = std::move(witness);
  return r;
}

FrameReport star_k_g(FrameKind kind, const OperatorFamily& f, const AdjointableOp& k, const CheckOptions& opts) {
  require_commutative(f.domain());
  require_k(f, k);
  const Realization s = realize(frame_operator(f));
  const Realization p = realize(compose(k, adjoint(k)));
  std::vector<double> lower;
  std::vector<double> upper;
  std::optional<Witness> witness;
  std::string note;
  bool all_degenerate = true;
  bool tight = true;
  for (std::size_t j = 0; j < s.blocks.size(); ++j) {
    const double u = block_spectrum(s.blocks[j]).max;
    upper.push_back(u);
    const PencilBound pb = pencil_lower_bound({s.blocks[j]}, {p.blocks[j]}, opts.tol);
    if (pb.degenerate) {
      // K vanishes on this coordinate, so any positive constant works there.
      lower.push_back(u > opts.tol ? u : 1.0);
      note += "K vanishes on coordinate " + std::to_string(j) + "; ";
      continue;
    }
    all_degenerate = false;
    tight = tight && pb.tight;
    lower.push_back(pb.value);
    if (pb.value <= opts.tol && !witness) {
      const Vector& v = pb.witness;
      const double num = (v.adjoint() * s.blocks[j] * v)(0).real();
      const double den = (v.adjoint() * p.blocks[j] * v)(0).real();
      witness = vector_witness(f.domain(), j, v, den > 0.0 ? num / den : 0.0, pb.infeasible,
                               "coordinate " + std::to_string(j) + ": S - c KK* indefinite");
    }
  }
  if (all_degenerate) {
    FrameReport r;
    r.kind = kind;
    Witness w;
    w.op = k;
    w.detail = "K is zero; a K-frame needs K != 0";
    r.witness = std::move(w);
    r.note = "degenerate K";
    return r;
  }
  FrameReport r = star_report(kind, f.domain(), lower, upper, opts);
  if (r.pass) {
    r.tight = tight;
    r.parseval = false;
    if (tight) {
      const auto* b = r.algebra_bounds();
      r.parseval = max_abs_diff(b->lower_product, AlgebraElement::identity(f.domain().spec())) <= kTightTol;
    }
  } else {
    r.witness = std::move(witness);
  }
  r.note = note;
  return r;
}

}  // namespace

FrameReport check_star_frame_commutative(const VectorFamily& v, const CheckOptions& opts) {
  return star_g(FrameKind::StarFrame, to_functionals(v), opts);
}

FrameReport check_star_g_frame_commutative(const OperatorFamily& f, const CheckOptions& opts) {
  return star_g(FrameKind::StarGFrame, f, opts);
}

FrameReport check_star_k_frame_commutative(const VectorFamily& v, const AdjointableOp& k, const CheckOptions& opts) {
  return star_k_g(FrameKind::StarKFrame, to_functionals(v), k, opts);
}

FrameReport check_star_k_g_frame_commutative(const OperatorFamily& f, const AdjointableOp& k,
                                             const CheckOptions& opts) {
  return star_k_g(FrameKind::StarKGFrame, f, k, opts);
}

// ---------------------------------------------------------------------------
// Sampled algebra-valued check.

FrameReport check_star_sampled(const OperatorFamily& f, const std::optional<AdjointableOp>& k,
                               const AlgebraElement& lower, const AlgebraElement& upper, const CheckOptions& opts) {
  if (k) require_k(f, *k);
  if (!(lower.spec() == f.domain().spec()) || !(upper.spec() == f.domain().spec())) {
    throw Error(ErrorKind::SpecMismatch, "bounds live in another algebra");
  }
  const std::optional<AdjointableOp> k_star = k ? std::optional(adjoint(*k)) : std::nullopt;
  const AlgebraElement lower_star = involution(lower);
  const AlgebraElement upper_star = involution(upper);
  Rng rng = Rng::derive(opts.seed, {kStarSampleStream});

  FrameReport r;
  r.kind = FrameKind::StarSampled;
  r.certified = false;
  r.pass = true;
  r.note = "sampling only: a pass means no counterexample among " + std::to_string(opts.samples) + " samples";
  for (std::size_t s = 0; s < opts.samples && r.pass; ++s) {
    const ModuleVector x = random_unit_vector(rng, f.domain());
    AlgebraElement middle = AlgebraElement::zero(f.domain().spec());
    for (const auto& t : f.members()) {
      const ModuleVector tx = apply(t, x);
      middle += inner_product(tx, tx);
    }
    const ModuleVector kx = k_star ? apply(*k_star, x) : x;
    const AlgebraElement low = lower * inner_product(kx, kx) * lower_star;
    const AlgebraElement high = upper * inner_product(x, x) * upper_star;
    const AlgebraElement low_gap = middle - low;
    const AlgebraElement high_gap = high - middle;
    const bool low_ok = is_positive(low_gap, opts.tol);
    const bool high_ok = is_positive(high_gap, opts.tol);
    if (!low_ok || !high_ok) {
      r.pass = false;
      Witness w;
      w.side = low_ok ? Side::Upper : Side::Lower;
      w.vector = x;
      w.value = min_eigenvalue(low_ok ? high_gap : low_gap);
      w.threshold = -opts.tol;
      w.detail = "sample " + std::to_string(s) + " violates the " + std::string(to_string(w.side)) + " bound";
      r.witness = std::move(w);
    }
  }
  return r;
}

FrameReport check_star_sampled(const VectorFamily& v, const std::optional<AdjointableOp>& k,
                               const AlgebraElement& lower, const AlgebraElement& upper, const CheckOptions& opts) {
  return check_star_sampled(to_functionals(v), k, lower, upper, opts);
}

// ---------------------------------------------------------------------------
// Operator-module checks.

namespace {

// Lower constants are compared against <TK, TK> (or <T, T> without K), upper
// constants against <T, T>. With per_coordinate the constants are algebra
// elements acting through left_action; otherwise they are scalars (size 1).
struct OperatorRoute {
  const OperatorFamily& family;
  const AdjointableOp* k;
  ModuleSpace codomain;
  bool per_coordinate;
};

CrossCheck run_operator_route(const OperatorRoute& route, bool certified, const std::vector<double>& lower,
                              const std::vector<double>& upper, const std::optional<AdjointableOp>& extra_sample,
                              const CheckOptions& opts, std::optional<Witness>& violation) {
  const ModuleSpace& h = route.family.domain();
  const AlgebraSpec& spec = h.spec();
  const std::size_t m = spec.num_blocks();
  const std::size_t slots = route.per_coordinate ? m : 1;

  std::vector<AdjointableOp> samples;
  Rng rng = Rng::derive(opts.seed, {kOperatorSampleStream});
  for (std::size_t s = 0; s < opts.samples; ++s) samples.push_back(random_unit_operator(rng, h, route.codomain));
  if (extra_sample) samples.push_back(*extra_sample);

  CrossCheck cc;
  cc.samples = samples.size();
  cc.certificate = certified;
  cc.sampled_lower.assign(slots, std::numeric_limits<double>::infinity());
  cc.sampled_upper.assign(slots, 0.0);

  std::optional<AdjointableOp> lower_op_factor;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const AdjointableOp& t = samples[s];
    const AdjointableOp middle = operator_frame_sum(route.family, t);
    const AdjointableOp gram = operator_inner(t, t);
    const AdjointableOp tk = route.k ? compose(t, *route.k) : t;
    const AdjointableOp gram_k = route.k ? operator_inner(tk, tk) : gram;

    const Realization rm = realize(middle);
    const Realization rn = realize(gram);
    const Realization rnk = realize(gram_k);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t slot = route.per_coordinate ? j : 0;
      const PencilExtremes lo = pencil_extremes(rm.blocks[j], rnk.blocks[j]);
      const PencilExtremes hi = pencil_extremes(rm.blocks[j], rn.blocks[j]);
      if (!lo.empty) cc.sampled_lower[slot] = std::min(cc.sampled_lower[slot], lo.min);
      if (!hi.empty) cc.sampled_upper[slot] = std::max(cc.sampled_upper[slot], hi.max);
    }

    if (!certified || violation) continue;
    AdjointableOp low_side = AdjointableOp::zero(route.codomain, route.codomain);
    AdjointableOp high_side = low_side;
    if (route.per_coordinate) {
      low_side = left_action(AlgebraElement::diagonal(spec, lower), gram_k);
      high_side = left_action(AlgebraElement::diagonal(spec, upper), gram);
    } else {
      low_side = scale(gram_k, lower[0]);
      high_side = scale(gram, upper[0]);
    }
    // Same scale as the certificate's feasibility test.
    const double scaled_tol = opts.tol * std::max(1.0, op_norm(high_side));
    const bool low_ok = is_psd_order(low_side, middle, scaled_tol);
    const bool high_ok = is_psd_order(middle, high_side, scaled_tol);
    if (!low_ok || !high_ok) {
      cc.bounds_hold = false;
      Witness w;
      w.side = low_ok ? Side::Upper : Side::Lower;
      w.op = t;
      w.value = low_ok ? psd_probe(subtract(high_side, middle)).min_eigenvalue
                       : psd_probe(subtract(middle, low_side)).min_eigenvalue;
      w.threshold = -scaled_tol;
      w.detail = "sampled operator " + std::to_string(s) + " violates the certified " +
                 std::string(to_string(w.side)) + " bound";
      violation = std::move(w);
    }
  }
  cc.verdict = std::all_of(cc.sampled_lower.begin(), cc.sampled_lower.end(), [&](double v) { return v > opts.tol; });
  cc.agrees = cc.verdict == certified && cc.bounds_hold;
  return cc;
}

// T_w(z) = <z, y> e_1, normalised: T_w^* maps e_1 onto the witness y, which
// realises the adversarial choice "T with T^* x = y".
std::optional<AdjointableOp> witness_operator(const std::optional<Witness>& w, const ModuleSpace& codomain) {
  if (!w || !w->vector) return std::nullopt;
  AdjointableOp t = outer(ModuleVector::unit(codomain, 0), *w->vector);
  const double n = op_norm(t);
  if (n <= 0.0) return std::nullopt;
  return scale(t, 1.0 / n);
}

FrameReport finish_operator_report(FrameReport cert, FrameKind kind, CrossCheck cc, std::optional<Witness> violation) {
  cert.kind = kind;
  const bool certified_pass = cert.pass;
  cert.pass = certified_pass && cc.agrees;
  if (!cc.agrees) {
    cert.note += (cert.note.empty() ? "" : "; ") + std::string("operator route disagrees with the certificate");
    if (violation) cert.witness = std::move(violation);
  }
  cert.cross_check = std::move(cc);
  return cert;
}

std::vector<double> scalar_slot(double v) { return {v}; }

std::vector<double> diagonal_values(const AlgebraElement& a) {
  std::vector<double> out;
  for (const auto& b : a.blocks()) out.push_back(b(0, 0).real());
  return out;
}

}  // namespace

FrameReport check_end_frame(const OperatorFamily& f, const CheckOptions& opts) {
  const ModuleSpace cod = require_common_codomain(f);
  FrameReport cert = check_g_frame(f, opts.tol);
  const auto* b = cert.scalar_bounds();
  std::optional<Witness> violation;
  CrossCheck cc = run_operator_route({f, nullptr, cod, false}, cert.pass, scalar_slot(b ? b->lower : 0.0),
                                     scalar_slot(b ? b->upper : 0.0), witness_operator(cert.witness, cod), opts,
                                     violation);
  return finish_operator_report(std::move(cert), FrameKind::EndFrame, std::move(cc), std::move(violation));
}

FrameReport check_k_end_frame(const OperatorFamily& f, const AdjointableOp& k, const CheckOptions& opts) {
  const ModuleSpace cod = require_common_codomain(f);
  FrameReport cert = check_k_g_frame(f, k, opts.tol);
  if (cert.note == "degenerate K") {
    cert.kind = FrameKind::KEndFrame;
    return cert;
  }
  const auto* b = cert.scalar_bounds();
  std::optional<Witness> violation;
  CrossCheck cc = run_operator_route({f, &k, cod, false}, cert.pass, scalar_slot(b ? b->lower : 0.0),
                                     scalar_slot(b ? b->upper : 0.0), witness_operator(cert.witness, cod), opts,
                                     violation);
  return finish_operator_report(std::move(cert), FrameKind::KEndFrame, std::move(cc), std::move(violation));
}

FrameReport check_generalized_end_frame(const OperatorFamily& f, const CheckOptions& opts) {
  const ModuleSpace cod = require_common_codomain(f);
  FrameReport cert = check_star_g_frame_commutative(f, opts);
  const auto* b = cert.algebra_bounds();
  const std::size_t m = f.domain().spec().num_blocks();
  std::optional<Witness> violation;
  CrossCheck cc = run_operator_route(
      {f, nullptr, cod, true}, cert.pass, b ? diagonal_values(b->lower_product) : std::vector<double>(m, 0.0),
      b ? diagonal_values(b->upper_product) : std::vector<double>(m, 0.0), witness_operator(cert.witness, cod), opts,
      violation);
  return finish_operator_report(std::move(cert), FrameKind::GeneralizedEndFrame, std::move(cc), std::move(violation));
}

FrameReport check_generalized_k_end_frame(const OperatorFamily& f, const AdjointableOp& k, const CheckOptions& opts) {
  const ModuleSpace cod = require_common_codomain(f);
  FrameReport cert = check_star_k_g_frame_commutative(f, k, opts);
  if (cert.note == "degenerate K") {
    cert.kind = FrameKind::GeneralizedKEndFrame;
    return cert;
  }
  const auto* b = cert.algebra_bounds();
  const std::size_t m = f.domain().spec().num_blocks();
  std::optional<Witness> violation;
  CrossCheck cc = run_operator_route(
      {f, &k, cod, true}, cert.pass, b ? diagonal_values(b->lower_product) : std::vector<double>(m, 0.0),
      b ? diagonal_values(b->upper_product) : std::vector<double>(m, 0.0), witness_operator(cert.witness, cod), opts,
      violation);
  return finish_operator_report(std::move(cert), FrameKind::GeneralizedKEndFrame, std::move(cc),
                                std::move(violation));
}

}  // namespace csf
