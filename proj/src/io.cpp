#include "lcaw/io.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <tuple>
#include <iomanip>
#include <regex>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace lcaw {

namespace {

int vp(int n, int p) {
  int e = 0;
  while (n % p == 0) n /= p, ++e;
  return e;
}

std::string at_line(const std::string& source, const toml::source_region& r) {
  return source + ":" + std::to_string(r.begin.line);
}

[[noreturn]] void fail_at(const std::string& source, const toml::node* node, const std::string& field,
                          const std::string& msg) {
  std::string where = node ? at_line(source, node->source()) : source;
  throw ConfigError(where + ": field '" + field + "': " + msg);
}

struct TomlReader {
  std::string source;

  const toml::node* require(const toml::table& t, const std::string& key, const std::string& path) const {
    const toml::node* n = t.get(key);
    if (!n) fail_at(source, &t, path + key, "missing");
    return n;
  }

  std::string string_at(const toml::node* n, const std::string& field) const {
    if (auto v = n->value<std::string>()) return *v;
    if (auto v = n->value<int64_t>()) return std::to_string(*v);
    fail_at(source, n, field, "expected a string");
  }

  int int_at(const toml::node* n, const std::string& field) const {
    if (auto v = n->value<int64_t>()) return static_cast<int>(*v);
    fail_at(source, n, field, "expected an integer");
  }

  const toml::array& array_at(const toml::node* n, const std::string& field) const {
    if (auto a = n->as_array()) return *a;
    fail_at(source, n, field, "expected an array");
  }

  const toml::table& table_at(const toml::node* n, const std::string& field) const {
    if (auto t = n->as_table()) return *t;
    fail_at(source, n, field, "expected a table");
  }

  Element element_at(const Group& g, const toml::node* n, const std::string& field) const {
    std::string text = string_at(n, field);
    try {
      return parse_element(g, text);
    } catch (const std::exception& e) {
      fail_at(source, n, field, e.what());
    }
  }

  Ball ball_at(const GeometryPtr& g, const toml::node* n, const std::string& field) const {
    const toml::table& t = table_at(n, field);
    Element c = element_at(g->group(), require(t, "center", field + "."), field + ".center");
    int k = int_at(require(t, "scale", field + "."), field + ".scale");
    return Ball{g->center(c, k), k};
  }

  BallSet balls_at(const GeometryPtr& g, const toml::node* n, const std::string& field) const {
    std::vector<Ball> balls;
    const toml::array& a = array_at(n, field);
    for (std::size_t i = 0; i < a.size(); ++i) balls.push_back(ball_at(g, a.get(i), field + "[" + std::to_string(i) + "]"));
    return canonicalize(g, balls);
  }
};

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

Json descriptor_json(const SelfSimilarity& d) {
  Json j;
  j["period"] = d.period;
  j["start"] = d.start;
  j["shifts"] = Json::array();
  for (const auto& s : d.shifts) j["shifts"].push_back(format_element(s));
  j["limits"] = Json::array();
  for (const auto& s : d.limits) j["limits"].push_back(format_element(s));
  j["total_measure"] = rational_json(d.total_measure);
  j["checked"] = d.checked;
  return j;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

// A rational "a/b" or a decimal, read exactly.
Rational number_text(const std::string& s) {
  try {
    return parse_rational(s);
  } catch (const std::exception&) {
    std::size_t used = 0;
    double d = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) throw std::invalid_argument("not a number: " + s);
    return Rational(d);
  }
}

// Real and imaginary parts when v lies in Q(i).
bool gaussian_parts(const Cyclo& v, Rational* re, Rational* im) {
  *re = 0;
  *im = 0;
  const Cyclo red = v.reduced();
  for (const auto& [a, c] : red.terms()) {
    if (4 % a.den != 0) return false;
    switch (a.num * (4 / a.den)) {
      case 0: *re += c; break;
      case 1: *im += c; break;
      case 2: *re -= c; break;
      default: *im -= c; break;
    }
  }
  re->canonicalize();
  im->canonicalize();
  return true;
}

}  // namespace

Group parse_field(const std::string& raw) {
  std::string name;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) name.push_back(ch);
  std::smatch m;
  static const std::regex prime(R"(Q_?(\d+))"), laurent(R"(F_?(\d+)(\(\(t\)\))?)"),
      sqrt_ext(R"(Q_?(\d+)\(sqrt_?(\d+)\))"), root_ext(R"(Q_?(\d+)\((\d+)\^\(1/(\d+)\)\))");
  if (std::regex_match(name, m, prime)) return GroupSpec::prime_field(std::stoi(m[1]));
  if (std::regex_match(name, m, laurent)) return GroupSpec::laurent_field(std::stoi(m[1]));
  int p = 0, e = 0;
  if (std::regex_match(name, m, sqrt_ext)) {
    p = std::stoi(m[1]);
    e = 2;
    if (std::stoi(m[2]) != p) throw std::invalid_argument("only Q_p(sqrt p) is supported: " + raw);
  } else if (std::regex_match(name, m, root_ext)) {
    p = std::stoi(m[1]);
    e = std::stoi(m[3]);
    if (std::stoi(m[2]) != p) throw std::invalid_argument("only Q_p(p^(1/e)) is supported: " + raw);
  } else {
    throw std::invalid_argument("unknown field '" + raw + "'");
  }
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  return GroupSpec::pi_extension(p, e, e * vp(e, p) + e - 1);
}

Group parse_group(const std::vector<std::string>& fields) {
  if (fields.empty()) throw std::invalid_argument("group needs at least one field");
  if (fields.size() == 1) return parse_field(fields[0]);
  std::vector<Group> parts;
  for (const auto& f : fields) parts.push_back(parse_field(f));
  return GroupSpec::product(parts);
}

std::vector<std::string> field_names(const Group& g) {
  std::vector<std::string> out;
  for (const auto& f : g->fields()) out.push_back(f.name());
  return out;
}

Config parse_config(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ConfigError(at_line(source, e.source()) + ": " + std::string(e.description()));
  }
  TomlReader rd{source};
  Config cfg;
  cfg.source = source;

  const toml::table& grp = rd.table_at(rd.require(root, "group", ""), "group");
  std::vector<std::string> fields;
  const toml::node* fn = rd.require(grp, "fields", "group.");
  if (fn->is_string()) {
    fields.push_back(rd.string_at(fn, "group.fields"));
  } else {
    const toml::array& a = rd.array_at(fn, "group.fields");
    for (std::size_t i = 0; i < a.size(); ++i) fields.push_back(rd.string_at(a.get(i), "group.fields"));
  }
  Group G;
  try {
    G = parse_group(fields);
  } catch (const std::exception& e) {
    fail_at(source, fn, "group.fields", e.what());
  }
  std::vector<int> shifts;
  const toml::node* sn = rd.require(grp, "shifts", "group.");
  const toml::array& sa = rd.array_at(sn, "group.shifts");
  for (std::size_t i = 0; i < sa.size(); ++i) shifts.push_back(rd.int_at(sa.get(i), "group.shifts"));
  std::vector<Element> units;
  if (const toml::node* un = grp.get("unit")) units.push_back(rd.element_at(G, un, "group.unit"));
  GeometryPtr g;
  try {
    Automorphism A = Automorphism::monomial(G, shifts, units);
    if (!A.is_expansive()) fail_at(source, sn, "group.shifts", "the automorphism is not expansive");
    g = make_geometry(A);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail_at(source, sn, "group.shifts", e.what());
  }

  SchemePtr D;
  if (const toml::node* scn = root.get("scheme")) {
    const toml::table& sc = rd.table_at(scn, "scheme");
    const toml::node* rn = rd.require(sc, "rho", "scheme.");
    const toml::array& ra = rd.array_at(rn, "scheme.rho");
    std::vector<Element> rho;
    for (std::size_t i = 0; i < ra.size(); ++i) rho.push_back(rd.element_at(G, ra.get(i), "scheme.rho"));
    try {
      D = std::make_shared<const CosetScheme>(g, rho);
    } catch (const std::exception& e) {
      fail_at(source, rn, "scheme.rho", e.what());
    }
  } else {
    D = std::make_shared<const CosetScheme>(CosetScheme::canonical(g));
  }

  const toml::node* cn = rd.require(root, "construction", "");
  const toml::table& con = rd.table_at(cn, "construction");
  if (const toml::node* n = con.get("m_max")) cfg.options.m_max = rd.int_at(n, "construction.m_max");
  if (const toml::node* n = con.get("patience")) cfg.options.patience = rd.int_at(n, "construction.patience");
  if (const toml::node* n = con.get("envelope_rounds"))
    cfg.options.envelope_rounds = rd.int_at(n, "construction.envelope_rounds");
  if (const toml::node* n = con.get("epsilon")) {
    try {
      if (auto d = n->value<double>(); d && !n->is_string()) cfg.options.epsilon = Rational(*d);
      else cfg.options.epsilon = parse_rational(rd.string_at(n, "construction.epsilon"));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail_at(source, n, "construction.epsilon", e.what());
    }
  }
  if (cfg.options.epsilon < 0) fail_at(source, con.get("epsilon"), "construction.epsilon", "must be nonnegative");

  std::string preset;
  if (const toml::node* n = con.get("preset")) preset = lower(rd.string_at(n, "construction.preset"));
  AlgorithmInput& in = cfg.input;
  if (preset == "haar") {
    in = haar_input(D);
  } else if (preset == "single") {
    const toml::node* n = rd.require(con, "sigma", "construction.");
    Element sigma = rd.element_at(G, n, "construction.sigma");
    try {
      in = single_input(D, sigma);
    } catch (const InvalidInput& e) {
      std::string msg = e.what();
      for (const auto& v : e.violations()) msg += "; " + v;
      fail_at(source, n, "construction.sigma", msg);
    }
  } else if (!preset.empty()) {
    fail_at(source, con.get("preset"), "construction.preset", "expected \"haar\" or \"single\"");
  } else {
    in.scheme = D;
    in.M = con.get("M") ? rd.int_at(con.get("M"), "construction.M") : 0;
    if (in.M < 0) fail_at(source, con.get("M"), "construction.M", "must be nonnegative");
    if (const toml::node* n = con.get("ell")) in.ell = rd.int_at(n, "construction.ell");
    const toml::node* mn = rd.require(root, "maps", "");
    const toml::array& maps = rd.array_at(mn, "maps");
    if (maps.empty()) fail_at(source, mn, "maps", "at least one map is required");
    for (std::size_t j = 0; j < maps.size(); ++j) {
      const std::string path = "maps[" + std::to_string(j) + "]";
      const toml::table& mt = rd.table_at(maps.get(j), path);
      const toml::node* pn = rd.require(mt, "pieces", path + ".");
      const toml::array& pieces = rd.array_at(pn, path + ".pieces");
      std::vector<MapPieceSpec> specs;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        const std::string pp = path + ".pieces[" + std::to_string(i) + "]";
        const toml::table& pt = rd.table_at(pieces.get(i), pp);
        MapPieceSpec s;
        s.domain = rd.ball_at(g, pieces.get(i), pp);
        const toml::node* sig = pt.get("sigma");
        const toml::node* sh = pt.get("shift");
        if (!!sig == !!sh) fail_at(source, &pt, pp, "give exactly one of 'sigma' and 'shift'");
        s.is_shift = sh != nullptr;
        s.value = rd.element_at(G, sig ? sig : sh, pp + (sig ? ".sigma" : ".shift"));
        specs.push_back(s);
      }
      try {
        in.maps.push_back(make_translation_map(specs, D, in.M));
      } catch (const InvalidInput& e) {
        std::string msg = e.what();
        for (const auto& v : e.violations()) msg += "; " + v;
        fail_at(source, pn, path + ".pieces", msg);
      }
      if (const toml::node* on = mt.get("omega0")) in.omega0.push_back(rd.balls_at(g, on, path + ".omega0"));
      else in.omega0.push_back(BallSet::origin(g, 0));
    }
  }
  if (const toml::node* n = con.get("N")) {
    if (rd.int_at(n, "construction.N") != static_cast<int>(in.N()))
      fail_at(source, n, "construction.N", "does not match the number of maps (" + std::to_string(in.N()) + ")");
  }
  AlgorithmInput probe = in;
  auto violations = validate_input(probe);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
    fail_at(source, cn, "construction", msg);
  }
  return cfg;
}

Config load_config(const std::string& path) { return parse_config(read_file(path), path); }

Json rational_json(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return rational_str(c);
}

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return number_text(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) return Rational(j.get<double>());
  throw std::invalid_argument("expected a rational");
}

Json scheme_to_json(const CosetScheme& D) {
  const Geometry& g = *D.geometry();
  Json j;
  j["fields"] = field_names(g.group());
  j["shifts"] = g.A().shifts();
  if (!g.A().trivial_units()) j["unit"] = format_element(g.A().unit());
  j["rho"] = Json::array();
  for (const auto& r : D.rho()) j["rho"].push_back(format_element(r));
  return j;
}

SchemePtr scheme_from_json(const Json& j) {
  Group G = parse_group(j.at("fields").get<std::vector<std::string>>());
  std::vector<Element> units;
  if (j.contains("unit")) units.push_back(parse_element(G, j.at("unit").get<std::string>()));
  auto g = make_geometry(Automorphism::monomial(G, j.at("shifts").get<std::vector<int>>(), units));
  if (!j.contains("rho")) return std::make_shared<const CosetScheme>(CosetScheme::canonical(g));
  std::vector<Element> rho;
  for (const auto& r : j.at("rho")) rho.push_back(parse_element(G, r.get<std::string>()));
  return std::make_shared<const CosetScheme>(g, rho);
}

Json ballset_to_json(const BallSet& X) {
  Json a = Json::array();
  for (const auto& b : X.balls()) a.push_back({{"center", format_element(b.center)}, {"scale", b.scale}});
  return a;
}

BallSet ballset_from_json(const Json& j, const GeometryPtr& g) {
  std::vector<Ball> balls;
  for (const auto& b : j) {
    int k = b.at("scale").get<int>();
    balls.push_back(Ball{g->center(parse_element(g->group(), b.at("center").get<std::string>()), k), k});
  }
  return canonicalize(g, balls);
}

Json result_to_json(const ConstructionResult& r) {
  Json j;
  j["scheme"] = scheme_to_json(*r.input.scheme);
  j["M"] = r.input.M;
  j["ell"] = r.input.ell;
  j["N"] = r.input.N();
  j["m"] = r.state.m;
  j["stop_reason"] = r.stop_reason;
  j["nonconvergence"] = r.nonconvergence;
  j["failures"] = r.failures;
  j["residual"] = rational_json(r.residual);
  j["residual_float"] = r.residual.get_d();
  j["sets"] = Json::array();
  for (std::size_t k = 0; k < r.input.N(); ++k) {
    Json s;
    s["j"] = k;
    s["omega"] = ballset_to_json(r.state.omega[k]);
    s["measure"] = rational_json(r.state.omega[k].measure());
    s["stabilized"] = ballset_to_json(r.stabilized[k]);
    s["envelope"] = ballset_to_json(r.envelope(k));
    s["lambda"] = Json::array();
    for (std::size_t i = 0; i < r.state.lambda[k].size(); ++i) {
      const BallSet& L = r.state.lambda[k][i];
      s["lambda"].push_back({{"m", i + 1}, {"measure", rational_json(L.measure())}, {"set", ballset_to_json(L)}});
    }
    s["lambda_total_measure"] = rational_json(r.state.lambda_total[k].measure());
    if (k < r.descriptors.size() && r.descriptors[k]) s["descriptor"] = descriptor_json(*r.descriptors[k]);
    else s["descriptor"] = nullptr;
    j["sets"].push_back(s);
  }
  if (auto lim = identify_limits(r)) {
    j["identified"] = Json::array();
    for (const auto& C : *lim) j["identified"].push_back(ballset_to_json(C));
  } else {
    j["identified"] = nullptr;
  }
  j["log"] = Json::array();
  for (const auto& l : r.log) {
    Json e;
    e["m"] = l.m;
    e["lambda_measure"] = Json::array();
    for (const auto& q : l.lambda_measure) e["lambda_measure"].push_back(rational_json(q));
    e["nmax"] = l.nmax;
    e["certificates"] = l.certificates;
    j["log"].push_back(e);
  }
  return j;
}

StoredResult result_from_json(const Json& j) {
  StoredResult r;
  try {
    r.scheme = scheme_from_json(j.at("scheme"));
    r.M = j.at("M").get<int>();
    r.m = j.at("m").get<int>();
    r.residual = rational_from_json(j.at("residual"));
    const GeometryPtr& g = r.scheme->geometry();
    for (const auto& s : j.at("sets")) {
      r.omega.push_back(ballset_from_json(s.at("omega"), g));
      r.envelope.push_back(s.contains("envelope") ? ballset_from_json(s.at("envelope"), g) : BallSet(g));
    }
    if (j.contains("identified") && j.at("identified").is_array())
      for (const auto& s : j.at("identified")) r.identified.push_back(ballset_from_json(s, g));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("result file: ") + e.what());
  }
  return r;
}

VerifyOutcome verify_result(const StoredResult& stored, const VerifyOptions& opts) {
  VerifyOutcome out;
  Json& rep = out.report;
  bool ok = true;
  StoredResult r = stored;
  const bool identified = opts.use_identified && !stored.identified.empty();
  if (identified) {
    r.omega = stored.identified;
    r.residual = 0;
  }
  rep["sets"] = identified ? "identified" : "truncated";
  rep["residual"] = rational_json(r.residual);
  rep["congruence"] = Json::array();
  for (std::size_t j = 0; j < r.omega.size(); ++j) {
    auto w = check_congruence(r.omega[j], *r.scheme);
    bool good = w.defect_measure <= r.residual;
    ok = ok && good;
    rep["congruence"].push_back({{"j", j},
                                 {"measure", rational_json(r.omega[j].measure())},
                                 {"defect_measure", rational_json(w.defect_measure)},
                                 {"defect_float", w.defect_measure.get_d()},
                                 {"overlap", ballset_to_json(w.overlap)},
                                 {"gap", ballset_to_json(w.gap)},
                                 {"within_residual", good}});
  }
  std::vector<BallSet> uncertain;
  if (r.residual != 0) uncertain = r.envelope;
  auto t = check_tiling(r.omega, opts.n0, opts.n1, uncertain);
  ok = ok && t.ok();
  rep["tiling"] = {{"window", {opts.n0, opts.n1}},
                   {"shells", {t.k0, t.k1}},
                   {"overlap_measure", rational_json(t.overlap_measure)},
                   {"gap_measure", rational_json(t.gap_measure)},
                   {"excluded_measure", rational_json(t.excluded_measure)},
                   {"max_shell_defect", rational_json(t.max_shell_defect)},
                   {"max_shell_defect_float", t.max_shell_defect.get_d()},
                   {"overlap", ballset_to_json(t.overlap)},
                   {"gap", ballset_to_json(t.gap)},
                   {"unexplained", ballset_to_json(t.unexplained)},
                   {"ok", t.ok()}};
  if (opts.gram_reps > 0) {
    auto syms = basis_symbols(r.omega, r.scheme, opts.gram_a0, opts.gram_a1, opts.gram_reps);
    auto G = gram_matrix(syms, opts.exact, opts.threads);
    // Truncated sets are not exactly orthonormal; their Gram check is informational.
    if (r.residual == 0) ok = ok && G.identity;
    rep["gram"] = {{"size", G.size},
                   {"dilations", {opts.gram_a0, opts.gram_a1}},
                   {"reps", opts.gram_reps},
                   {"exact", opts.exact},
                   {"identity", G.identity},
                   {"max_deviation", G.max_deviation},
                   {"nonzero_offdiag", G.nonzero_offdiag},
                   {"counted", r.residual == 0}};
  }
  rep["ok"] = ok;
  out.ok = ok;
  return out;
}

Json cyclo_to_json(const Cyclo& v, bool exact) {
  std::complex<double> z = v.to_complex();
  Json j{{"re", z.real()}, {"im", z.imag()}};
  if (exact) {
    Json terms = Json::array();
    const Cyclo red = v.reduced();
    for (const auto& [a, c] : red.terms()) terms.push_back({rational_str(c), a.str()});
    j["exact"] = {{"terms", terms}};
  }
  return j;
}

Json scalar_to_json(const ExactScalar& v, bool exact) {
  Json j = cyclo_to_json(v.value, exact);
  std::complex<double> z = v.to_complex();
  j["re"] = z.real();
  j["im"] = z.imag();
  if (exact && v.root) j["exact"]["sqrt"] = v.base;
  return j;
}

Cyclo cyclo_from_json(const Json& j) {
  if (j.contains("exact")) {
    Cyclo v;
    for (const auto& t : j.at("exact").at("terms")) {
      Rational a = parse_rational(t.at(1).get<std::string>());
      v.add_term(parse_rational(t.at(0).get<std::string>()), Angle::from_rational(a));
    }
    if (j.at("exact").contains("sqrt")) v = v * sqrt_cyclo(j.at("exact").at("sqrt").get<long>());
    return v;
  }
  Rational re = j.contains("re") ? rational_from_json(j.at("re")) : Rational(0);
  Rational im = j.contains("im") ? rational_from_json(j.at("im")) : Rational(0);
  return Cyclo::gaussian(re, im);
}

ExactScalar scalar_from_json(const Json& j) {
  ExactScalar s;
  if (j.contains("exact") && j.at("exact").contains("sqrt")) {
    Json plain = j;
    plain["exact"].erase("sqrt");
    s.value = cyclo_from_json(plain);
    s.root = true;
    s.base = j.at("exact").at("sqrt").get<long>();
    return s;
  }
  s.value = cyclo_from_json(j);
  return s;
}

Json signal_to_json(const FiniteSignal& f, bool exact) {
  Json j;
  Json grp;
  grp["fields"] = field_names(f.geometry()->group());
  grp["shifts"] = f.geometry()->A().shifts();
  if (!f.geometry()->A().trivial_units()) grp["unit"] = format_element(f.geometry()->A().unit());
  j["group"] = grp;
  j["L"] = f.L();
  j["K"] = f.K();
  j["cells"] = Json::array();
  for (std::size_t c = 0; c < f.cells(); ++c) {
    if (f.value(c).is_zero()) continue;
    Json cell{{"key", f.key(c)}};
    Json val = cyclo_to_json(f.value(c), exact);
    for (auto& [k, v] : val.items()) cell[k] = v;
    j["cells"].push_back(cell);
  }
  return j;
}

FiniteSignal signal_from_json(const Json& j, const GeometryPtr& g) {
  try {
    if (j.contains("group")) {
      const Json& grp = j.at("group");
      if (grp.at("fields").get<std::vector<std::string>>() != field_names(g->group()) ||
          grp.at("shifts").get<std::vector<int>>() != g->A().shifts())
        throw ConfigError("signal group does not match the basis group");
    }
    FiniteSignal f(g, j.at("L").get<int>(), j.at("K").get<int>());
    for (const auto& cell : j.at("cells")) f.set(f.cell_of_key(cell.at("key").get<std::string>()), cyclo_from_json(cell));
    return f;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("signal file: ") + e.what());
  }
}

std::string signal_to_csv(const FiniteSignal& f) {
  std::ostringstream os;
  os << "key,re,im\n";
  for (std::size_t c = 0; c < f.cells(); ++c) {
    os << '"' << f.key(c) << "\",";
    Rational re, im;
    if (gaussian_parts(f.value(c), &re, &im)) {
      os << rational_str(re) << ',' << rational_str(im) << '\n';
    } else {
      std::complex<double> z = f.value(c).to_complex();
      os << std::setprecision(17) << z.real() << ',' << z.imag() << '\n';
    }
  }
  return os.str();
}

FiniteSignal signal_from_csv(const std::string& text, const GeometryPtr& g, int L, int K) {
  FiniteSignal f(g, L, K);
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || (lineno == 1 && line.rfind("key", 0) == 0)) continue;
    std::string key, rest;
    if (line[0] == '"') {
      auto close = line.find('"', 1);
      if (close == std::string::npos) throw ConfigError("csv line " + std::to_string(lineno) + ": unterminated key");
      key = line.substr(1, close - 1);
      rest = line.substr(close + 1);
    } else {
      auto comma = line.find(',');
      key = line.substr(0, comma);
      rest = comma == std::string::npos ? "" : line.substr(comma);
    }
    std::vector<std::string> cols;
    std::stringstream rs(rest);
    std::string col;
    while (std::getline(rs, col, ','))
      if (!col.empty()) cols.push_back(col);
    if (cols.empty() || cols.size() > 2) throw ConfigError("csv line " + std::to_string(lineno) + ": expected key,re,im");
    try {
      Rational re = number_text(cols[0]);
      Rational im = cols.size() > 1 ? number_text(cols[1]) : Rational(0);
      f.set(f.cell_of_key(key), Cyclo::gaussian(re, im));
    } catch (const std::exception& e) {
      throw ConfigError("csv line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return f;
}

Json coefficients_to_json(const Basis& B, const std::vector<ExactScalar>& c, int L, int K, bool exact) {
  Json j;
  j["scheme"] = scheme_to_json(*B.scheme());
  j["sets"] = Json::array();
  for (const auto& om : B.omegas()) j["sets"].push_back(ballset_to_json(om));
  j["a0"] = B.a0();
  j["a1"] = B.a1();
  j["L"] = L;
  j["K"] = K;
  j["window_L"] = B.L();
  j["coefficients"] = Json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const BasisEntry& e = B.entries()[i];
    Json x{{"j", e.j}, {"a", e.a}, {"rep", e.rep}, {"s", format_element(B.symbols()[i].s())}};
    Json val = scalar_to_json(c[i], exact);
    for (auto& [k, v] : val.items()) x[k] = v;
    j["coefficients"].push_back(x);
  }
  return j;
}

std::vector<ExactScalar> coefficients_from_json(const Json& j, const Basis& B) {
  std::vector<ExactScalar> c(B.size());
  std::map<std::tuple<std::size_t, int, long>, std::size_t> index;
  for (std::size_t i = 0; i < B.size(); ++i) index[{B.entries()[i].j, B.entries()[i].a, B.entries()[i].rep}] = i;
  for (const auto& x : j.at("coefficients")) {
    auto it = index.find({x.at("j").get<std::size_t>(), x.at("a").get<int>(), x.at("rep").get<long>()});
    if (it == index.end()) throw ConfigError("coefficient outside the basis window");
    c[it->second] = scalar_from_json(x);
  }
  return c;
}

std::string render_svg(const std::vector<BallSet>& sets, const RenderStyle& style, RenderStats* stats) {
  if (sets.empty()) throw std::invalid_argument("nothing to render");
  const GeometryPtr& g = sets[0].geometry();
  BallSet all = unite(sets, g);
  int root = 0;
  if (all.empty() || is_subset(all, BallSet::origin(g, 0))) {
    while (root < 64 && !all.empty() && is_subset(all, BallSet::origin(g, root + 1))) ++root;
  } else {
    while (!is_subset(all, BallSet::origin(g, root))) --root;
  }
  const long n = g->index();
  const double ratio = style.radius_ratio > 0 ? style.radius_ratio : 1 / std::sqrt(static_cast<double>(n));
  const double fit = std::sin(M_PI / static_cast<double>(n)) / (1 + std::sin(M_PI / static_cast<double>(n)));
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
                                  "#8c564b", "#e377c2", "#bcbd22", "#7f7f7f", "#393b79", "#637939"};
  RenderStats st;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.size << "\" height=\"" << style.size
     << "\" viewBox=\"0 0 " << style.size << ' ' << style.size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::function<void(const Ball&, double, double, double, int, bool)> draw = [&](const Ball& b, double cx, double cy,
                                                                                double r, int d, bool inside) {
    BallSet B = BallSet::ball(g, b.center, b.scale);
    std::string fill = "none";
    double opacity = 0;
    bool now_inside = inside;
    for (std::size_t j = 0; j < sets.size() && !inside; ++j) {
      if (is_subset(B, sets[j])) {
        fill = palette[j % 12];
        opacity = 0.55;
        now_inside = true;
        break;
      }
      if (d == style.depth) {
        Rational frac = intersect(B, sets[j]).measure() / B.measure();
        if (frac > 0) {
          fill = palette[j % 12];
          opacity = 0.55 * frac.get_d();
        }
      }
    }
    ++st.circles;
    if (fill != "none") ++st.filled;
    os << "<circle cx=\"" << fmt_double(cx) << "\" cy=\"" << fmt_double(cy) << "\" r=\"" << fmt_double(r)
       << "\" fill=\"" << fill << "\"";
    if (fill != "none") os << " fill-opacity=\"" << fmt_double(opacity) << "\"";
    os << " stroke=\"black\" stroke-width=\"" << fmt_double(std::max(0.3, r / 60)) << "\"><title>"
       << format_element(b.center) << " scale " << b.scale << "</title></circle>\n";
    if (d == style.depth) return;
    const double rc = r * std::min(ratio, fit);
    auto kids = children(*g, b);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      double ang = 2 * M_PI * static_cast<double>(i) / static_cast<double>(kids.size()) - M_PI / 2;
      double dist = kids.size() == 1 ? 0 : r - rc;
      draw(kids[i], cx + dist * std::cos(ang), cy + dist * std::sin(ang), rc, d + 1, now_inside);
    }
  };
  draw(Ball{Element::zero(g->group()), root}, style.size / 2, style.size / 2, style.size / 2 - 4, 0, false);
  os << "</svg>\n";
  if (stats) *stats = st;
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

}  // namespace lcaw
