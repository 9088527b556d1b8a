#include "cstarframe/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cstarframe/errors.hpp"

namespace csf {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }
[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::ValidationError, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string(what) + " must be a number");
  return j.get<double>();
}

std::string text(const Json& j, const char* what) {
  if (!j.is_string()) parse_fail(std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::optional<std::string> optional_text(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return text(j.at(key), key);
}

// Non-finite numbers have no JSON spelling; they are written as strings.
Json real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json reals(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(real(x));
  return out;
}

template <class T>
const T& lookup(const std::vector<Named<T>>& items, const std::string& name, const char* what) {
  for (const auto& item : items) {
    if (item.name == name) return item.value;
  }
  invalid(std::string("unknown ") + what + " '" + name + "'");
}

Json bounds_json(const std::variant<std::monostate, ScalarBounds, AlgebraBounds>& b) {
  if (const auto* s = std::get_if<ScalarBounds>(&b)) return Json{{"lower", real(s->lower)}, {"upper", real(s->upper)}};
  if (const auto* a = std::get_if<AlgebraBounds>(&b)) {
    return Json{{"lower", to_json(a->lower)},
                {"upper", to_json(a->upper)},
                {"lower_product", to_json(a->lower_product)},
                {"upper_product", to_json(a->upper_product)},
                {"strictly_positive", a->strictly_positive}};
  }
  return nullptr;
}

}  // namespace

// ---------------------------------------------------------------------------

Json to_json(Complex z) { return Json::array({real(z.real()), real(z.imag())}); }

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const AlgebraSpec& spec) { return Json{{"block_sizes", spec.block_sizes()}}; }

Json to_json(const AlgebraElement& a) {
  Json blocks = Json::array();
  for (const auto& b : a.blocks()) blocks.push_back(to_json(b));
  return Json{{"blocks", std::move(blocks)}};
}

Json to_json(const ModuleSpace& space) {
  return Json{{"block_sizes", space.spec().block_sizes()}, {"rank", space.rank()}};
}

Json to_json(const ModuleVector& x) {
  Json coords = Json::array();
  for (const auto& c : x.coords()) coords.push_back(to_json(c));
  return Json{{"space", to_json(x.space())}, {"coords", std::move(coords)}};
}

Json to_json(const AdjointableOp& t) {
  Json rows = Json::array();
  for (int i = 0; i < t.domain().rank(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < t.codomain().rank(); ++k) row.push_back(to_json(t.entry(i, k)));
    rows.push_back(std::move(row));
  }
  return Json{{"domain", to_json(t.domain())}, {"codomain", to_json(t.codomain())}, {"entries", std::move(rows)}};
}

Json to_json(const OperatorFamily& f) {
  Json members = Json::array();
  for (const auto& t : f.members()) members.push_back(to_json(t));
  return Json{{"domain", to_json(f.domain())}, {"members", std::move(members)}};
}

Json to_json(const Witness& w) {
  Json j{{"side", std::string(to_string(w.side))}};
  j["vector"] = w.vector ? to_json(*w.vector) : Json(nullptr);
  j["operator"] = w.op ? to_json(*w.op) : Json(nullptr);
  j["value"] = real(w.value);
  j["threshold"] = real(w.threshold);
  j["detail"] = w.detail;
  return j;
}

Json to_json(const CrossCheck& c) {
  return Json{{"samples", c.samples},
              {"certificate", c.certificate ? "pass" : "fail"},
              {"verdict", c.verdict ? "pass" : "fail"},
              {"bounds_hold", c.bounds_hold},
              {"agrees", c.agrees},
              {"sampled_lower", reals(c.sampled_lower)},
              {"sampled_upper", reals(c.sampled_upper)}};
}

Json to_json(const FrameReport& r) {
  Json j{{"kind", std::string(to_string(r.kind))}, {"verdict", r.pass ? "pass" : "fail"}};
  j["bounds"] = bounds_json(r.bounds);
  j["tight"] = r.tight;
  j["parseval"] = r.parseval;
  j["certified"] = r.certified;
  j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  j["cross_check"] = r.cross_check ? to_json(*r.cross_check) : Json(nullptr);
  j["note"] = r.note;
  return j;
}

Json to_json(const ConstructionCertificate& c) {
  Json checks = Json::array();
  for (const auto& n : c.checks) checks.push_back(Json{{"name", n.name}, {"pass", n.pass}, {"detail", n.detail}});
  return Json{{"construction", c.construction},
              {"verdict", c.pass ? "pass" : "fail"},
              {"predicted", bounds_json(c.predicted)},
              {"checks", std::move(checks)},
              {"input", to_json(c.input)},
              {"output", to_json(c.output)}};
}

// ---------------------------------------------------------------------------

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) parse_fail("a complex number is [re, im]");
  return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) parse_fail("a matrix is a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) parse_fail("ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

AlgebraSpec spec_from_json(const Json& j) {
  const Json& sizes = j.is_array() ? j : field(j, "block_sizes");
  if (!sizes.is_array()) parse_fail("block_sizes must be an array");
  std::vector<int> out;
  for (const auto& s : sizes) {
    if (!s.is_number_integer()) parse_fail("block sizes must be integers");
    out.push_back(s.get<int>());
  }
  return AlgebraSpec(std::move(out));
}

AlgebraElement element_from_json(const Json& j) {
  const Json& blocks = field(j, "blocks");
  if (!blocks.is_array()) parse_fail("blocks must be an array");
  std::vector<Matrix> mats;
  std::vector<int> sizes;
  for (const auto& b : blocks) {
    mats.push_back(matrix_from_json(b));
    sizes.push_back(static_cast<int>(mats.back().rows()));
  }
  AlgebraSpec spec = j.contains("block_sizes") ? spec_from_json(j) : AlgebraSpec(sizes);
  return AlgebraElement(std::move(spec), std::move(mats));
}

ModuleSpace space_from_json(const Json& j) {
  const Json& rank = field(j, "rank");
  if (!rank.is_number_integer()) parse_fail("rank must be an integer");
  return ModuleSpace(spec_from_json(j), rank.get<int>());
}

ModuleVector vector_from_json(const Json& j) {
  ModuleSpace space = space_from_json(field(j, "space"));
  const Json& coords = field(j, "coords");
  if (!coords.is_array()) parse_fail("coords must be an array");
  std::vector<AlgebraElement> out;
  for (const auto& c : coords) out.push_back(element_from_json(c));
  return ModuleVector(std::move(space), std::move(out));
}

namespace {

std::vector<AlgebraElement> entries_from_json(const Json& j) {
  if (!j.is_array()) parse_fail("entries must be an array of rows");
  std::vector<AlgebraElement> out;
  for (const auto& row : j) {
    if (!row.is_array()) parse_fail("entries must be an array of rows");
    for (const auto& e : row) out.push_back(element_from_json(e));
  }
  return out;
}

}  // namespace

AdjointableOp operator_from_json(const Json& j) {
  return AdjointableOp(space_from_json(field(j, "domain")), space_from_json(field(j, "codomain")),
                       entries_from_json(field(j, "entries")));
}

// ---------------------------------------------------------------------------
// Instances.

const ModuleSpace& Instance::space(const std::string& name) const { return lookup(spaces, name, "space"); }
const AdjointableOp& Instance::op(const std::string& name) const { return lookup(operators, name, "operator"); }
const AlgebraElement& Instance::element(const std::string& name) const { return lookup(elements, name, "element"); }
const ModuleVector& Instance::vector(const std::string& name) const { return lookup(vectors, name, "vector"); }

const FamilyRef& Instance::family(const std::string& name) const {
  for (const auto& f : families) {
    if (f.name == name) return f;
  }
  invalid("unknown family '" + name + "'");
}

OperatorFamily Instance::operator_family(const std::string& name) const {
  const FamilyRef& ref = family(name);
  if (ref.vectors) invalid("family '" + name + "' holds vectors, not operators");
  std::vector<AdjointableOp> members;
  for (const auto& m : ref.members) members.push_back(op(m));
  return OperatorFamily(space(ref.space), std::move(members));
}

VectorFamily Instance::vector_family(const std::string& name) const {
  const FamilyRef& ref = family(name);
  if (!ref.vectors) invalid("family '" + name + "' holds operators, not vectors");
  std::vector<ModuleVector> members;
  for (const auto& m : ref.members) members.push_back(vector(m));
  return VectorFamily(space(ref.space), std::move(members));
}

OperatorFamily Instance::as_operator_family(const std::string& name) const {
  return family(name).vectors ? to_functionals(vector_family(name)) : operator_family(name);
}

std::string Instance::add_space(const ModuleSpace& s) {
  for (const auto& item : spaces) {
    if (item.value == s) return item.name;
  }
  std::string name = "S" + std::to_string(spaces.size());
  spaces.push_back({name, s});
  return name;
}

namespace {

const std::set<std::string>& check_names() {
  static const std::set<std::string> names{
      "g-frame",      "vector-frame",  "k-g-frame",          "star-frame",           "star-g-frame",
      "star-k-frame", "star-k-g-frame", "star-sampled",      "end-frame",            "k-end-frame",
      "generalized-end-frame", "generalized-k-end-frame", "closed-range"};
  return names;
}

const std::set<std::string>& construction_names() {
  static const std::set<std::string> names{"direct-sum-lift", "parseval-k",          "k-frame-from-frame",
                                           "k2k1",            "power-k",             "surjective-demotion",
                                           "injective-example", "frame-as-k-frame"};
  return names;
}

bool needs_k(const std::string& action) {
  static const std::set<std::string> names{"k-g-frame",   "star-k-frame",       "star-k-g-frame",
                                           "k-end-frame", "generalized-k-end-frame", "k-frame-from-frame",
                                           "k2k1",        "power-k",            "surjective-demotion",
                                           "frame-as-k-frame"};
  return names.count(action) > 0;
}

bool wants_vectors(const std::string& action) {
  return action == "vector-frame" || action == "star-frame" || action == "star-k-frame";
}

}  // namespace

void validate(const Instance& inst) {
  if (inst.schema_version != kSchemaVersion) {
    invalid("unsupported schema_version " + std::to_string(inst.schema_version));
  }
  std::set<std::string> seen;
  auto unique = [&](const std::string& name) {
    if (name.empty()) invalid("empty name");
    if (!seen.insert(name).second) invalid("duplicate name '" + name + "'");
  };
  for (const auto& s : inst.spaces) {
    unique(s.name);
    if (!(s.value.spec() == inst.algebra)) invalid("space '" + s.name + "' uses another algebra");
  }
  for (const auto& e : inst.elements) {
    unique(e.name);
    if (!(e.value.spec() == inst.algebra)) invalid("element '" + e.name + "' uses another algebra");
  }
  for (const auto& o : inst.operators) {
    unique(o.name);
    if (!(o.value.domain().spec() == inst.algebra)) invalid("operator '" + o.name + "' uses another algebra");
  }
  for (const auto& v : inst.vectors) {
    unique(v.name);
    if (!(v.value.space().spec() == inst.algebra)) invalid("vector '" + v.name + "' uses another algebra");
  }
  for (const auto& f : inst.families) {
    unique(f.name);
    if (f.members.empty()) invalid("family '" + f.name + "' has no members");
    try {
      if (f.vectors) {
        (void)inst.vector_family(f.name);
      } else {
        (void)inst.operator_family(f.name);
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ValidationError) throw;
      invalid("family '" + f.name + "': " + e.what());
    }
  }
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    const Request& r = inst.requests[i];
    const std::string where = "request " + std::to_string(i) + " (" + r.action + ")";
    const auto& names = r.construction ? construction_names() : check_names();
    if (names.count(r.action) == 0) invalid(where + ": unknown action");
    if (r.action == "closed-range") {
      (void)inst.op(r.target);
    } else {
      const FamilyRef& f = inst.family(r.target);
      if (wants_vectors(r.action) && !f.vectors) invalid(where + ": needs a vector family");
    }
    if (needs_k(r.action) && !r.k) invalid(where + ": needs k");
    if (r.k) {
      const AdjointableOp& k = inst.op(*r.k);
      if (!k.is_endomorphism()) invalid(where + ": k must be an endomorphism");
    }
    if (r.action == "k2k1" && !r.k2) invalid(where + ": needs k2");
    if (r.k2) (void)inst.op(*r.k2);
    if (r.action == "star-sampled" && (!r.lower || !r.upper)) invalid(where + ": needs lower and upper elements");
    if (r.lower) (void)inst.element(*r.lower);
    if (r.upper) (void)inst.element(*r.upper);
    if (r.action == "power-k" && (!r.n || *r.n < 0)) invalid(where + ": needs n >= 0");
  }
  if (!(inst.tolerances.tol > 0.0) || !(inst.tolerances.eps_strict > 0.0)) invalid("tolerances must be positive");
}

Json instance_to_json(const Instance& inst) {
  Json j;
  j["schema_version"] = inst.schema_version;
  j["algebra"] = to_json(inst.algebra);
  Json spaces = Json::array();
  for (const auto& s : inst.spaces) spaces.push_back(Json{{"name", s.name}, {"rank", s.value.rank()}});
  j["spaces"] = std::move(spaces);

  auto space_ref = [&](const ModuleSpace& s) -> Json {
    for (const auto& item : inst.spaces) {
      if (item.value == s) return item.name;
    }
    return to_json(s);
  };

  Json elements = Json::array();
  for (const auto& e : inst.elements) elements.push_back(Json{{"name", e.name}, {"blocks", to_json(e.value)["blocks"]}});
  j["elements"] = std::move(elements);

  Json ops = Json::array();
  for (const auto& o : inst.operators) {
    Json oj = to_json(o.value);
    ops.push_back(Json{{"name", o.name},
                       {"domain", space_ref(o.value.domain())},
                       {"codomain", space_ref(o.value.codomain())},
                       {"entries", std::move(oj["entries"])}});
  }
  j["operators"] = std::move(ops);

  Json vecs = Json::array();
  for (const auto& v : inst.vectors) {
    Json vj = to_json(v.value);
    vecs.push_back(Json{{"name", v.name}, {"space", space_ref(v.value.space())}, {"coords", std::move(vj["coords"])}});
  }
  j["vectors"] = std::move(vecs);

  Json fams = Json::array();
  for (const auto& f : inst.families) {
    fams.push_back(Json{{"name", f.name},
                        {"type", f.vectors ? "vectors" : "operators"},
                        {"space", f.space},
                        {"members", f.members}});
  }
  j["families"] = std::move(fams);

  Json reqs = Json::array();
  for (const auto& r : inst.requests) {
    Json rj;
    rj[r.construction ? "construct" : "check"] = r.action;
    rj[r.action == "closed-range" ? "operator" : "family"] = r.target;
    if (r.k) rj["k"] = *r.k;
    if (r.k2) rj["k2"] = *r.k2;
    if (r.lower) rj["lower"] = *r.lower;
    if (r.upper) rj["upper"] = *r.upper;
    if (r.n) rj["n"] = *r.n;
    reqs.push_back(std::move(rj));
  }
  j["requests"] = std::move(reqs);
  j["seed"] = inst.seed;
  j["tolerances"] = Json{{"tol", inst.tolerances.tol},
                         {"eps_strict", inst.tolerances.eps_strict},
                         {"samples", inst.tolerances.samples}};
  return j;
}

Instance instance_from_json(const Json& j) {
  if (!j.is_object()) parse_fail("an instance is a JSON object");
  Instance inst;
  const Json& version = field(j, "schema_version");
  if (!version.is_number_integer()) parse_fail("schema_version must be an integer");
  inst.schema_version = version.get<int>();
  try {
    inst.algebra = spec_from_json(field(j, "algebra"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    invalid(std::string("algebra: ") + e.what());
  }

  auto list = [&](const char* key) -> const Json& {
    static const Json empty = Json::array();
    if (!j.contains(key)) return empty;
    if (!j.at(key).is_array()) parse_fail(std::string(key) + " must be an array");
    return j.at(key);
  };
  auto resolve_space = [&](const Json& ref) -> ModuleSpace {
    if (ref.is_string()) return inst.space(ref.get<std::string>());
    return space_from_json(ref);
  };
  // Library validation errors inside the file count as validation failures.
  auto guarded = [&](const std::string& what, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::ValidationError) throw;
      invalid(what + ": " + e.what());
    }
  };

  for (const auto& s : list("spaces")) {
    const std::string name = text(field(s, "name"), "space name");
    const Json& rank = field(s, "rank");
    if (!rank.is_number_integer()) parse_fail("rank must be an integer");
    guarded("space '" + name + "'", [&] { inst.spaces.push_back({name, ModuleSpace(inst.algebra, rank.get<int>())}); });
  }
  for (const auto& e : list("elements")) {
    const std::string name = text(field(e, "name"), "element name");
    guarded("element '" + name + "'", [&] {
      std::vector<Matrix> blocks;
      const Json& bj = field(e, "blocks");
      if (!bj.is_array()) parse_fail("blocks must be an array");
      for (const auto& b : bj) blocks.push_back(matrix_from_json(b));
      inst.elements.push_back({name, AlgebraElement(inst.algebra, std::move(blocks))});
    });
  }
  for (const auto& o : list("operators")) {
    const std::string name = text(field(o, "name"), "operator name");
    guarded("operator '" + name + "'", [&] {
      inst.operators.push_back({name, AdjointableOp(resolve_space(field(o, "domain")),
                                                    resolve_space(field(o, "codomain")),
                                                    entries_from_json(field(o, "entries")))});
    });
  }
  for (const auto& v : list("vectors")) {
    const std::string name = text(field(v, "name"), "vector name");
    guarded("vector '" + name + "'", [&] {
      std::vector<AlgebraElement> coords;
      const Json& cj = field(v, "coords");
      if (!cj.is_array()) parse_fail("coords must be an array");
      for (const auto& c : cj) coords.push_back(element_from_json(c));
      inst.vectors.push_back({name, ModuleVector(resolve_space(field(v, "space")), std::move(coords))});
    });
  }
  for (const auto& f : list("families")) {
    FamilyRef ref;
    ref.name = text(field(f, "name"), "family name");
    const std::string type = f.contains("type") ? text(f.at("type"), "family type") : "operators";
    if (type != "operators" && type != "vectors") parse_fail("family type must be 'operators' or 'vectors'");
    ref.vectors = type == "vectors";
    ref.space = text(field(f, "space"), "family space");
    const Json& members = field(f, "members");
    if (!members.is_array()) parse_fail("members must be an array");
    for (const auto& m : members) ref.members.push_back(text(m, "member name"));
    inst.families.push_back(std::move(ref));
  }
  for (const auto& r : list("requests")) {
    Request req;
    if (r.contains("check")) {
      req.action = text(r.at("check"), "check");
    } else if (r.contains("construct")) {
      req.construction = true;
      req.action = text(r.at("construct"), "construct");
    } else {
      parse_fail("a request needs 'check' or 'construct'");
    }
    if (r.contains("family")) {
      req.target = text(r.at("family"), "family");
    } else if (r.contains("operator")) {
      req.target = text(r.at("operator"), "operator");
    } else {
      parse_fail("a request needs 'family' or 'operator'");
    }
    req.k = optional_text(r, "k");
    req.k2 = optional_text(r, "k2");
    req.lower = optional_text(r, "lower");
    req.upper = optional_text(r, "upper");
    if (r.contains("n")) {
      if (!r.at("n").is_number_integer()) parse_fail("n must be an integer");
      req.n = r.at("n").get<int>();
    }
    inst.requests.push_back(std::move(req));
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) parse_fail("seed must be a non-negative integer");
    inst.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    if (!t.is_object()) parse_fail("tolerances must be an object");
    if (t.contains("tol")) inst.tolerances.tol = number(t.at("tol"), "tol");
    if (t.contains("eps_strict")) inst.tolerances.eps_strict = number(t.at("eps_strict"), "eps_strict");
    if (t.contains("samples")) {
      if (!t.at("samples").is_number_unsigned()) parse_fail("samples must be a non-negative integer");
      inst.tolerances.samples = t.at("samples").get<std::size_t>();
    }
  }
  validate(inst);
  return inst;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_text(const std::string& input) {
  try {
    return Json::parse(input);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail(e.what());
  }
}

}  // namespace csf
