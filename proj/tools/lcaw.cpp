#include <CLI11.hpp>

#include <iostream>

#include "lcaw/io.hpp"

using namespace lcaw;

namespace {

std::pair<int, int> parse_range(const std::string& text, const std::string& flag) {
  auto colon = text.find(':', 1);
  if (colon == std::string::npos) throw CLI::ValidationError(flag, "expected lo:hi, got '" + text + "'");
  try {
    int lo = std::stoi(text.substr(0, colon)), hi = std::stoi(text.substr(colon + 1));
    if (lo > hi) throw CLI::ValidationError(flag, "empty range " + text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError(flag, "expected lo:hi, got '" + text + "'");
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct SetSource {
  std::string config, result;
  int m_max = -1;
  std::string epsilon;
  int threads = 1;
  bool truncated = false;
};

ConstructionResult construct(const SetSource& src) {
  Config cfg = load_config(src.config);
  if (src.m_max >= 0) cfg.options.m_max = src.m_max;
  if (!src.epsilon.empty()) cfg.options.epsilon = parse_rational(src.epsilon);
  return run(cfg.input, cfg.options);
}

// The wavelet sets and their scheme, from a result file or by running a config.
StoredResult load_sets(const SetSource& src) {
  if (!src.result.empty()) return result_from_json(Json::parse(read_file(src.result)));
  if (src.config.empty()) throw ConfigError("give --result or --config");
  return result_from_json(result_to_json(construct(src)));
}

// Identified limit sets when available, else the truncated sets.
std::vector<BallSet> working_sets(const StoredResult& r, const SetSource& src) {
  return src.truncated || r.identified.empty() ? r.omega : r.identified;
}

void add_source(CLI::App* cmd, SetSource& src) {
  cmd->add_option("--config", src.config, "construction config (TOML)");
  cmd->add_option("--result", src.result, "construction result (JSON)");
  cmd->add_option("--m-max", src.m_max, "override the step limit");
  cmd->add_option("--epsilon", src.epsilon, "override the stopping threshold");
  cmd->add_flag("--truncated", src.truncated, "use the truncated sets even when limit sets were identified");
}

std::vector<Element> read_points(const std::string& path, const Group& G) {
  std::string text = read_file(path);
  std::vector<Element> out;
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[' && text.find('"') != std::string::npos) {
    for (const auto& p : Json::parse(text)) out.push_back(parse_element(G, p.get<std::string>()));
    return out;
  }
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos && line[line.find_first_not_of(" \t\r")] != '#')
      out.push_back(parse_element(G, line));
  return out;
}

TransformPath parse_path(const std::string& s) {
  if (s == "auto") return TransformPath::Auto;
  if (s == "reference") return TransformPath::Reference;
  if (s == "haar") return TransformPath::Haar;
  throw CLI::ValidationError("--path", "expected auto, reference or haar");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet sets and wavelet transforms on groups with a compact open subgroup"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out = "-";
  bool exact = false;
  int threads = 1;
  app.add_option("--out", out, "output file, - for stdout")->capture_default_str();
  app.add_flag("--exact", exact, "exact rational/cyclotomic output and arithmetic");
  app.add_option("--threads", threads, "worker threads")->capture_default_str();

  SetSource src;
  auto* c_construct = app.add_subcommand("construct", "run the wavelet set construction");
  c_construct->add_option("--config", src.config, "construction config (TOML)")->required();
  c_construct->add_option("--m-max", src.m_max, "override the step limit");
  c_construct->add_option("--epsilon", src.epsilon, "override the stopping threshold");

  std::string window = "-4:4", gram = "-2:2";
  long gram_reps = 0;
  auto* c_verify = app.add_subcommand("verify", "check congruence, tiling and orthonormality");
  add_source(c_verify, src);
  c_verify->add_option("--window", window, "dilation window n0:n1 for the tiling check")->capture_default_str();
  c_verify->add_option("--gram", gram, "dilations a0:a1 of the Gram check")->capture_default_str();
  c_verify->add_option("--gram-reps", gram_reps, "coset representatives per dilation (0 skips the Gram check)");

  std::size_t j_index = 0;
  int dil = 0;
  std::string s_text = "0", points;
  auto* c_eval = app.add_subcommand("eval", "evaluate one wavelet at points of G");
  add_source(c_eval, src);
  c_eval->add_option("--j", j_index, "wavelet set index")->capture_default_str();
  c_eval->add_option("--a", dil, "dilation")->capture_default_str();
  c_eval->add_option("--s", s_text, "translation (element literal)")->capture_default_str();
  c_eval->add_option("--points", points, "points file: JSON array or one literal per line")->required();

  std::string signal, path = "auto";
  std::string twindow;
  int sig_L = -1, sig_K = -1;
  double threshold = 0;
  auto* c_transform = app.add_subcommand("transform", "wavelet coefficients of a signal");
  add_source(c_transform, src);
  c_transform->add_option("--signal", signal, "signal file (JSON, or CSV with --L and --K)")->required();
  c_transform->add_option("--window", twindow, "dilations a0:a1 (default: the complete window)");
  c_transform->add_option("--L", sig_L, "support exponent of a CSV signal");
  c_transform->add_option("--K", sig_K, "cell exponent of a CSV signal");
  c_transform->add_option("--threshold", threshold, "drop coefficients of smaller modulus");
  c_transform->add_option("--path", path, "auto, reference or haar")->capture_default_str();

  std::string coeffs;
  auto* c_inverse = app.add_subcommand("inverse", "signal from wavelet coefficients");
  c_inverse->add_option("--coefficients", coeffs, "coefficient file from transform")->required();
  c_inverse->add_option("--path", path, "auto, reference or haar")->capture_default_str();

  int depth = 3;
  double ratio = 0;
  std::string which = "omega";
  auto* c_render = app.add_subcommand("render", "SVG of nested balls coloured by set");
  add_source(c_render, src);
  c_render->add_option("--depth", depth, "levels below the enclosing ball")->capture_default_str();
  c_render->add_option("--ratio", ratio, "child to parent radius ratio (default |A|^-1/2)");
  c_render->add_option("--which", which, "omega or envelope")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  src.threads = threads;

  try {
    if (c_construct->parsed()) {
      ConstructionResult r = construct(src);
      write_output(out, result_to_json(r).dump(2) + "\n");
      std::cerr << "m=" << r.state.m << " stop=" << r.stop_reason << " residual=" << rational_str(r.residual)
                << (r.failures.empty() ? "" : " INVARIANT FAILURES") << "\n";
      return r.failures.empty() ? 0 : 3;
    }
    if (c_verify->parsed()) {
      StoredResult r = load_sets(src);
      VerifyOptions opts;
      std::tie(opts.n0, opts.n1) = parse_range(window, "--window");
      std::tie(opts.gram_a0, opts.gram_a1) = parse_range(gram, "--gram");
      opts.gram_reps = gram_reps;
      opts.exact = exact;
      opts.threads = threads;
      opts.use_identified = !src.truncated;
      VerifyOutcome v = verify_result(r, opts);
      write_output(out, v.report.dump(2) + "\n");
      std::cerr << (v.ok ? "ok" : "DEFECTS beyond the declared residual") << "\n";
      return v.ok ? 0 : 1;
    }
    if (c_eval->parsed()) {
      StoredResult r = load_sets(src);
      auto sets = working_sets(r, src);
      if (j_index >= sets.size()) throw ConfigError("--j out of range");
      const Group& G = r.scheme->geometry()->group();
      WaveletSymbol psi(sets[j_index], dil, parse_element(G, s_text), r.scheme);
      Json res = Json::array();
      for (const auto& x : read_points(points, G)) {
        Json v{{"point", format_element(x)}};
        Json value = scalar_to_json(wavelet_eval(psi, x), exact);
        for (auto& [k, val] : value.items()) v[k] = val;
        res.push_back(v);
      }
      write_output(out, res.dump(2) + "\n");
      return 0;
    }
    if (c_transform->parsed()) {
      StoredResult r = load_sets(src);
      const GeometryPtr& g = r.scheme->geometry();
      if (ends_with(signal, ".csv") && (sig_L < 0 || sig_K < 0)) throw ConfigError("CSV signals need --L and --K");
      FiniteSignal f = ends_with(signal, ".csv") ? signal_from_csv(read_file(signal), g, sig_L, sig_K)
                                                 : signal_from_json(Json::parse(read_file(signal)), g);
      auto sets = working_sets(r, src);
      Basis B = twindow.empty() ? Basis::complete(sets, r.scheme, f.L(), f.K())
                                : [&] {
                                    auto [a0, a1] = parse_range(twindow, "--window");
                                    return Basis::window(sets, r.scheme, a0, a1, f.L());
                                  }();
      auto c = analyze(f, B, parse_path(path), threads);
      if (threshold > 0)
        for (auto& x : c)
          if (std::abs(x.to_complex()) < threshold) x = ExactScalar{};
      Json res = coefficients_to_json(B, c, f.L(), f.K(), exact);
      ParsevalReport pr = parseval_check(f, B, threads);
      res["parseval"] = {{"norm2", rational_json(pr.norm2)},
                         {"ratio", pr.rational ? rational_json(pr.ratio) : Json(pr.ratio_approx)},
                         {"complete", pr.complete},
                         {"note", pr.note}};
      write_output(out, res.dump(2) + "\n");
      std::cerr << B.size() << " coefficients, energy ratio "
                << (pr.rational ? rational_str(pr.ratio) : std::to_string(pr.ratio_approx))
                << (pr.complete ? "" : " (" + pr.note + ")") << "\n";
      return 0;
    }
    if (c_inverse->parsed()) {
      Json j = Json::parse(read_file(coeffs));
      SchemePtr D = scheme_from_json(j.at("scheme"));
      std::vector<BallSet> sets;
      for (const auto& s : j.at("sets")) sets.push_back(ballset_from_json(s, D->geometry()));
      const int a0 = j.at("a0").get<int>(), a1 = j.at("a1").get<int>(), wl = j.at("window_L").get<int>();
      if (wl < 0) throw ConfigError("coefficients come from a fixed basis and cannot be inverted");
      Basis B = Basis::window(sets, D, a0, a1, wl);
      FiniteSignal f = synthesize(coefficients_from_json(j, B), B, j.at("L").get<int>(), j.at("K").get<int>(),
                                  parse_path(path));
      write_output(out, ends_with(out, ".csv") ? signal_to_csv(f) : signal_to_json(f, exact).dump(2) + "\n");
      return 0;
    }
    if (c_render->parsed()) {
      StoredResult r = load_sets(src);
      if (which != "omega" && which != "envelope") throw ConfigError("--which must be omega or envelope");
      RenderStyle style;
      style.depth = depth;
      style.radius_ratio = ratio;
      RenderStats st;
      std::string svg = render_svg(which == "omega" ? working_sets(r, src) : r.envelope, style, &st);
      write_output(out, svg);
      std::cerr << st.circles << " circles, " << st.filled << " filled\n";
      return 0;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "malformed JSON: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
