#include "acml/scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace acml {

namespace detail {
const std::map<std::string, std::string>& bundled_scenarios();
}

const std::map<std::string, std::string>& bundled_scenarios() {
  return detail::bundled_scenarios();
}

// ---------------------------------------------------------------------------
// scenario text parsing

namespace {

struct KeyValue {
  std::string key;
  std::string value;
  int line;
};

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

// positions where an `ident =` assignment starts, quote-aware
std::vector<size_t> assignment_starts(const std::string& s) {
  std::vector<size_t> out;
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"') {
      quoted = !quoted;
      continue;
    }
    if (quoted) continue;
    if (ident_char(c) && (i == 0 || !ident_char(s[i - 1]))) {
      size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      size_t k = j;
      while (k < s.size() && (s[k] == ' ' || s[k] == '\t')) ++k;
      if (k < s.size() && s[k] == '=') out.push_back(i);
    }
  }
  return out;
}

std::vector<KeyValue> split_assignments(const std::string& content, int line) {
  std::vector<KeyValue> out;
  const auto starts = assignment_starts(content);
  if (starts.empty()) {
    if (!trim(content).empty())
      throw ScenarioError("expected key = value, got '" + trim(content) + "'", line);
    return out;
  }
  if (!trim(content.substr(0, starts.front())).empty())
    throw ScenarioError("stray text before first key", line);
  for (size_t s = 0; s < starts.size(); ++s) {
    const size_t begin = starts[s];
    const size_t end = s + 1 < starts.size() ? starts[s + 1] : content.size();
    std::string chunk = content.substr(begin, end - begin);
    const size_t eq = chunk.find('=');
    KeyValue kv;
    kv.key = trim(chunk.substr(0, eq));
    kv.value = trim(chunk.substr(eq + 1));
    kv.line = line;
    out.push_back(std::move(kv));
  }
  return out;
}

std::vector<std::string> split_top_level(const std::string& value, char sep) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : value) {
    if (c == '"') quoted = !quoted;
    if (c == sep && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string unquote(const std::string& s, int line) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"')
    throw ScenarioError("expected quoted expression, got '" + s + "'", line);
  return s.substr(1, s.size() - 2);
}

double parse_double(const std::string& s, int line) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ScenarioError("expected a number, got '" + s + "'", line);
  }
}

long long parse_int(const std::string& s, int line) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ScenarioError("expected an integer, got '" + s + "'", line);
  }
}

std::vector<std::array<double, 2>> parse_box(const std::string& value, int line) {
  std::vector<std::array<double, 2>> box;
  size_t i = 0;
  auto skip_ws = [&]() { while (i < value.size() && std::isspace(static_cast<unsigned char>(value[i]))) ++i; };
  while (true) {
    skip_ws();
    if (i >= value.size() || value[i] != '[')
      throw ScenarioError("box: expected '[' in '" + value + "'", line);
    const size_t close = value.find(']', i);
    if (close == std::string::npos) throw ScenarioError("box: missing ']'", line);
    const auto parts = split_top_level(value.substr(i + 1, close - i - 1), ',');
    if (parts.size() != 2) throw ScenarioError("box: interval needs two bounds", line);
    box.push_back({parse_double(parts[0], line), parse_double(parts[1], line)});
    i = close + 1;
    skip_ws();
    if (i >= value.size()) break;
    if (value[i] != 'x') throw ScenarioError("box: expected 'x' between intervals", line);
    ++i;
  }
  return box;
}

int suffix_index(const std::string& key, char prefix, int line) {
  if (key.size() < 2 || key[0] != prefix)
    throw ScenarioError("unknown key '" + key + "'", line);
  try {
    return std::stoi(key.substr(1));
  } catch (const std::exception&) {
    throw ScenarioError("unknown key '" + key + "'", line);
  }
}

const std::set<std::string>& known_tasks() {
  static const std::set<std::string> tasks = {
      "validate", "classify", "q4",       "theorem5",      "theorem7",
      "theorem8", "theoremN1", "transport", "lift",        "lift-theorems"};
  return tasks;
}

}  // namespace

Scenario load_scenario(const std::string& text) {
  Scenario sc;
  std::vector<std::string> row_lines_g, row_lines_phi;
  std::map<int, std::string> gamma_by_index;
  std::map<int, std::pair<std::vector<std::string>, int>> g_rows, phi_rows;
  std::string section;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s[0] == '[') {
      const size_t close = s.find(']');
      if (close == std::string::npos) throw ScenarioError("missing ']'", line);
      section = trim(s.substr(1, close - 1));
      s = trim(s.substr(close + 1));
      if (s.empty()) continue;
    }
    for (const KeyValue& kv : split_assignments(s, line)) {
      if (section.empty()) {
        if (kv.key == "name") sc.name = kv.value;
        else if (kv.key == "dim") sc.dim = static_cast<int>(parse_int(kv.value, line));
        else throw ScenarioError("unknown key '" + kv.key + "'", line);
      } else if (section == "gamma") {
        gamma_by_index[suffix_index(kv.key, 'a', line)] = unquote(kv.value, line);
      } else if (section == "g" || section == "phi") {
        const int r = suffix_index(kv.key, 'r', line);
        std::vector<std::string> row;
        for (const auto& item : split_top_level(kv.value, ','))
          row.push_back(unquote(item, line));
        auto& target = section == "g" ? g_rows : phi_rows;
        target[r] = {std::move(row), line};
      } else if (section == "sample") {
        if (kv.key == "box") sc.sample.box = parse_box(kv.value, line);
        else if (kv.key == "points") sc.sample.count = static_cast<int>(parse_int(kv.value, line));
        else if (kv.key == "seed") sc.sample.seed = static_cast<uint64_t>(parse_int(kv.value, line));
        else if (kv.key == "tol") sc.sample.tolerance = parse_double(kv.value, line);
        else throw ScenarioError("unknown key '" + kv.key + "' in [sample]", line);
      } else if (section == "tasks") {
        if (kv.key != "run") throw ScenarioError("unknown key '" + kv.key + "' in [tasks]", line);
        for (const auto& t : split_top_level(kv.value, ',')) {
          if (!known_tasks().count(t))
            throw ScenarioError("unknown task '" + t + "'", line);
          sc.tasks.push_back(t);
        }
      } else if (section == "transport") {
        TransportSpec& tr = sc.transport ? *sc.transport : sc.transport.emplace();
        if (kv.key == "kind") tr.kind = kv.value;
        else if (kv.key == "center") {
          tr.center.clear();
          for (const auto& c : split_top_level(kv.value, ','))
            tr.center.push_back(parse_double(c, line));
        } else if (kv.key == "plane") {
          const auto parts = split_top_level(kv.value, ',');
          if (parts.size() != 2) throw ScenarioError("plane needs two indices", line);
          tr.plane_i = static_cast<int>(parse_int(parts[0], line)) - 1;
          tr.plane_j = static_cast<int>(parse_int(parts[1], line)) - 1;
        } else if (kv.key == "side") tr.side = parse_double(kv.value, line);
        else if (kv.key == "steps") tr.steps = static_cast<int>(parse_int(kv.value, line));
        else if (kv.key == "v0") {
          tr.v0.clear();
          for (const auto& c : split_top_level(kv.value, ','))
            tr.v0.push_back(parse_double(c, line));
        } else if (kv.key == "curve") {
          tr.kind = "path";
          tr.path.clear();
          for (const auto& c : split_top_level(kv.value, ','))
            tr.path.push_back(unquote(c, line));
        } else throw ScenarioError("unknown key '" + kv.key + "' in [transport]", line);
      } else {
        throw ScenarioError("unknown section '" + section + "'", line);
      }
    }
  }

  if (sc.dim < 3 || sc.dim % 2 == 0)
    throw ScenarioError("dim must be odd and >= 3", 0);
  const int m = sc.dim - 1;

  sc.gamma.resize(m);
  for (int a = 1; a <= m; ++a) {
    auto it = gamma_by_index.find(a);
    if (it == gamma_by_index.end())
      throw ScenarioError("[gamma] is missing a" + std::to_string(a), 0);
    sc.gamma[a - 1] = it->second;
  }
  auto collect = [&](std::map<int, std::pair<std::vector<std::string>, int>>& rows,
                     const char* what) {
    std::vector<std::vector<std::string>> out(m);
    for (int r = 1; r <= m; ++r) {
      auto it = rows.find(r);
      if (it == rows.end())
        throw ScenarioError(std::string("[") + what + "] is missing r" + std::to_string(r), 0);
      if (static_cast<int>(it->second.first.size()) != m)
        throw ScenarioError(std::string(what) + " row r" + std::to_string(r) + " has " +
                                std::to_string(it->second.first.size()) +
                                " entries, expected " + std::to_string(m),
                            it->second.second);
      out[r - 1] = it->second.first;
    }
    for (auto& [r, row] : rows)
      if (r < 1 || r > m)
        throw ScenarioError(std::string(what) + " row index out of range", row.second);
    return out;
  };
  sc.g = collect(g_rows, "g");
  sc.phi = collect(phi_rows, "phi");

  if (sc.sample.box.empty()) sc.sample.box.assign(sc.dim, {-1.0, 1.0});
  if (static_cast<int>(sc.sample.box.size()) != sc.dim)
    throw ScenarioError("sample box has " + std::to_string(sc.sample.box.size()) +
                            " intervals, expected " + std::to_string(sc.dim), 0);
  if (sc.tasks.empty()) throw ScenarioError("[tasks] run list is empty", 0);

  // validate every expression now so diagnostics carry scenario context
  auto check_expr = [&](const std::string& src, const std::string& where) {
    try {
      Expr::parse(src, sc.dim);
    } catch (const ParseError& e) {
      throw ScenarioError(where + ": " + e.what() + " (offset " +
                              std::to_string(e.offset()) + ")", 0);
    }
  };
  for (int a = 0; a < m; ++a)
    check_expr(sc.gamma[a], "gamma a" + std::to_string(a + 1));
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      check_expr(sc.g[r][c], "g r" + std::to_string(r + 1) + " entry " + std::to_string(c + 1));
      check_expr(sc.phi[r][c], "phi r" + std::to_string(r + 1) + " entry " + std::to_string(c + 1));
    }
  for (int r = 0; r < m; ++r)
    for (int c = r + 1; c < m; ++c)
      if (sc.g[r][c] != sc.g[c][r]) {
        sc.warnings.push_back("g is not symmetric as text at (r" + std::to_string(r + 1) +
                              ", r" + std::to_string(c + 1) + "); numeric symmetry is still checked");
      }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
  }
  std::string name = path;
  const size_t slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto& bundle = bundled_scenarios();
  auto it = bundle.find(name);
  if (it == bundle.end()) it = bundle.find(name + ".scn");
  if (it == bundle.end())
    throw ScenarioError("cannot open '" + path + "' and no bundled scenario matches", 0);
  return load_scenario(it->second);
}

// ---------------------------------------------------------------------------
// execution

namespace {

AlmostContactStructure build_structure(const Scenario& sc) {
  const int m = sc.dim - 1;
  AdaptedChart chart = AdaptedChart::from_exprs(sc.dim, sc.gamma);
  std::vector<ScalarField> g_fields(static_cast<size_t>(m) * m);
  std::vector<ScalarField> phi_fields(static_cast<size_t>(m) * m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      // share field objects across textually equal symmetric entries
      if (c < r && sc.g[r][c] == sc.g[c][r])
        g_fields[static_cast<size_t>(r) * m + c] = g_fields[static_cast<size_t>(c) * m + r];
      else
        g_fields[static_cast<size_t>(r) * m + c] =
            ScalarField::from_expr(Expr::parse(sc.g[r][c], sc.dim));
      phi_fields[static_cast<size_t>(r) * m + c] =
          ScalarField::from_expr(Expr::parse(sc.phi[r][c], sc.dim));
    }
  return AlmostContactStructure(
      chart, AdmissibleTensorField(chart, 0, 2, std::move(g_fields)),
      AdmissibleTensorField(chart, 1, 1, std::move(phi_fields)));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double field_fd_partial(const ScalarField& f, const Point& p, int coord, double h) {
  Point hi = p, lo = p;
  hi[coord] += h;
  lo[coord] -= h;
  return (f.value(hi) - f.value(lo)) / (2.0 * h);
}

FdCheckBlock run_fd_check(const AlmostContactStructure& s, const SampleSpec& spec) {
  // every jet-based primitive plus derived omega and connection coefficients
  std::vector<ScalarField> fields;
  const int m = s.frame_dim();
  for (int a = 0; a < m; ++a) fields.push_back(s.chart().gamma(a));
  for (const auto& f : s.metric().components()) fields.push_back(f);
  for (const auto& f : s.phi().components()) fields.push_back(f);
  for (const auto& f : s.omega().components()) fields.push_back(f);
  const InteriorConnection conn = interior_metric_connection(s);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) fields.push_back(conn.gamma(a, b, c));

  SampleSpec fd_spec = spec;
  fd_spec.count = 25;
  fd_spec.seed = spec.seed ^ 0xfdfdfdfdULL;
  const auto points = sample_points(fd_spec);
  const double h = 1e-4;
  FdCheckBlock block;
  block.present = true;
  block.points = fd_spec.count;
  block.entries = static_cast<int>(fields.size());
  EvalCache cache;
  for (const Point& p : points)
    for (const auto& f : fields) {
      const Jet j = f.jet(p, 1, &cache);
      for (int d = 0; d < static_cast<int>(p.size()); ++d) {
        const double fd = field_fd_partial(f, p, d, h);
        block.max_discrepancy =
            std::max(block.max_discrepancy, std::fabs(fd - j.partial1(d)));
      }
    }
  return block;
}

}  // namespace

bool Report::any_fail() const {
  return std::any_of(tasks.begin(), tasks.end(),
                     [](const TaskResult& t) { return t.verdict == "fail"; });
}

Report run_scenario(const Scenario& sc, const RunOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  Report rep;
  rep.scenario = sc;
  if (opts.points_override) rep.scenario.sample.count = *opts.points_override;
  if (opts.seed_override) rep.scenario.sample.seed = *opts.seed_override;
  if (opts.tol_override) rep.scenario.sample.tolerance = *opts.tol_override;
  const int threads = std::max(1, opts.threads);

  AlmostContactStructure current;
  std::string construction_error;
  try {
    current = build_structure(rep.scenario);
  } catch (const std::exception& e) {
    construction_error = e.what();
  }

  SampleSpec spec = rep.scenario.sample;
  std::optional<LiftedSpace> lifted;
  SampleSpec base_spec_of_lift = spec;  // spec used when the lift was taken
  bool have_classification = false;

  for (const std::string& name : rep.scenario.tasks) {
    TaskResult task;
    task.name = name;
    task.tolerance = spec.tolerance;
    if (!construction_error.empty()) {
      task.verdict = "fail";
      task.notes.push_back("structure construction failed: " + construction_error);
      rep.tasks.push_back(std::move(task));
      continue;
    }
    try {
      if (name == "validate") {
        task.tolerance = 1e-10;
        const auto diags =
            validate_structure(current, sample_points(spec), task.tolerance);
        task.verdict = diags.empty() ? "pass" : "fail";
        for (const auto& d : diags) {
          task.max_residual = std::max(task.max_residual, d.residual);
          if (task.notes.size() < 5)
            task.notes.push_back(d.message + " (residual " + fmt(d.residual) + ")");
          if (task.witness.empty()) task.witness = d.point;
        }
      } else if (name == "classify") {
        const ClassificationReport c = classify(current, spec, threads);
        task.verdict = "info";
        auto note = [&](const char* label, const PredicateResult& p) {
          task.notes.push_back(std::string(label) + "=" + (p.verdict ? "true" : "false") +
                               " max_residual=" + fmt(p.max_residual));
          if (p.max_residual > task.max_residual) {
            task.max_residual = p.max_residual;
            task.witness = p.witness;
          }
        };
        note("contact_metric", c.contact_metric);
        note("almost_hermitian", c.almost_hermitian);
        note("normal", c.normal);
        note("sasakian", c.sasakian);
        note("ack_full", c.ack_full);
        note("ack_horizontal", c.ack_horizontal);
        rep.classification = {c.contact_metric.verdict, c.almost_hermitian.verdict,
                              c.normal.verdict,        c.sasakian.verdict,
                              c.ack_full.verdict,      c.ack_horizontal.verdict};
        have_classification = true;
      } else if (name == "q4") {
        task.tolerance = 1e-6;
        const Q4Result r = check_q4(current, spec, threads);
        task.max_residual = r.max_residual;
        task.witness = r.witness;
        task.verdict = r.max_residual <= task.tolerance ? "pass" : "fail";
        task.notes.push_back("reduced-form residual " + fmt(r.max_residual_q5));
        task.notes.push_back("almost-normal hypothesis residual " +
                             fmt(r.almost_normal_residual));
        if (r.almost_normal_residual <= 1e-10 &&
            r.max_residual_q5 > task.tolerance) {
          task.verdict = "fail";
          task.notes.push_back("reduced form disagrees under the almost-normal hypothesis");
        }
      } else if (name == "theoremN1") {
        const TheoremN1Result r = check_theorem_N1(current, spec, threads);
        task.max_residual = std::max(r.n1_residual, r.omega_invariance_residual);
        task.witness = r.witness;
        task.notes.push_back("normality residual " + fmt(r.n1_residual));
        task.notes.push_back("omega phi-invariance residual " +
                             fmt(r.omega_invariance_residual));
        if (r.skipped) {
          task.verdict = "info";
          task.notes.push_back("skipped: structure is not almost Hermitian (residual " +
                               fmt(r.precondition_residual) + ")");
        } else {
          task.verdict = r.consistent ? "pass" : "fail";
        }
      } else if (name == "theorem5") {
        const Theorem5Result r = check_theorem5_torsion(current, spec, threads);
        task.tolerance = 1e-10;
        task.max_residual = r.torsion_match_residual;
        task.witness = r.witness;
        task.notes.push_back("prescribed-torsion match " + fmt(r.torsion_match_residual));
        task.notes.push_back("nabla1 phi " + fmt(r.nabla1_phi) + ", P(N_phi) " +
                             fmt(r.pn_residual));
        task.verdict = (r.torsion_match_residual <= 1e-10 && r.evidence_consistent)
                           ? "pass"
                           : "fail";
      } else if (name == "theorem7") {
        const Theorem7Result r = check_theorem7(current, spec, threads);
        task.max_residual = r.nabla1_phi;
        task.witness = r.witness;
        task.notes.push_back("nabla1 phi " + fmt(r.nabla1_phi));
        task.notes.push_back("dOmega full " + fmt(r.domega_full) + ", horizontal " +
                             fmt(r.domega_horizontal));
        task.notes.push_back(std::string("consistent: full=") +
                             (r.consistent_full ? "true" : "false") + " horizontal=" +
                             (r.consistent_horizontal ? "true" : "false"));
        if (r.convention_flag) {
          task.verdict = "info";
          task.notes.push_back(
              "convention-discrepancy: the two closedness readings disagree; "
              "nabla1 phi = 0 matches the horizontal reading only");
        } else {
          task.verdict =
              (r.consistent_full && r.consistent_horizontal) ? "pass" : "fail";
        }
      } else if (name == "theorem8") {
        const Theorem8Result r = check_theorem8(current, spec, threads);
        task.max_residual = r.q7_residual;
        task.witness = r.witness;
        task.notes.push_back("covariant-display residual " + fmt(r.q7_residual));
        task.notes.push_back("nabla phi " + fmt(r.nabla_phi) + ", d_n phi " +
                             fmt(r.dn_phi) + ", d_n g " + fmt(r.dn_g));
        if (r.consistent_full && r.consistent_horizontal) {
          task.verdict = "pass";
        } else if (r.consistent_full || r.consistent_horizontal) {
          task.verdict = "info";
          task.notes.push_back("consistent under one closedness reading only");
        } else {
          task.verdict = "fail";
        }
      } else if (name == "transport") {
        const InteriorConnection conn = interior_metric_connection(current);
        const ExtendedConnection ec{conn};
        TransportSpec tr;
        if (rep.scenario.transport) tr = *rep.scenario.transport;
        const int m = current.frame_dim();
        if (tr.center.empty()) {
          tr.center.resize(current.chart().dim());
          for (size_t d = 0; d < tr.center.size(); ++d)
            tr.center[d] = 0.5 * (spec.box[d][0] + spec.box[d][1]);
        }
        std::vector<double> v0 = tr.v0;
        v0.resize(m, 0.0);
        if (tr.v0.empty()) v0[0] = 1.0;
        std::vector<double> v_end;
        if (tr.kind == "path") {
          ParametricCurve curve;
          for (const auto& src : tr.path)
            curve.components.push_back(ScalarField::from_expr(Expr::parse(src, 1)));
          v_end = parallel_transport(ec, curve, v0, tr.steps);
        } else {
          v_end = parallel_transport(
              ec, square_loop(tr.center, tr.plane_i, tr.plane_j, tr.side), v0,
              tr.steps);
        }
        const bool closed = tr.kind != "path";
        double dev = 0.0;
        if (closed)
          for (int i = 0; i < m; ++i)
            dev = std::max(dev, std::fabs(v_end[i] - v0[i]));
        // curvature magnitude decides the expectation
        const AdmissibleTensorField r = schouten_curvature(conn);
        double rmax = 0.0;
        EvalCache cache;
        for (const Point& p : sample_points(spec))
          for (const auto& f : r.components())
            rmax = std::max(rmax, std::fabs(f.value(p, &cache)));
        task.max_residual = closed ? dev : 0.0;
        task.tolerance = std::max(1e-8, spec.tolerance);
        std::ostringstream end;
        end << "end vector:";
        for (double x : v_end) end << ' ' << fmt_full(x);
        task.notes.push_back(end.str());
        task.notes.push_back("max |curvature| " + fmt(rmax));
        if (!closed) {
          task.verdict = "info";
        } else if (rmax <= spec.tolerance) {
          task.verdict = dev <= task.tolerance ? "pass" : "fail";
          task.notes.push_back("zero curvature: loop transport must return the vector");
        } else {
          task.verdict = "info";
          task.notes.push_back("nonzero curvature: loop deviation " + fmt(dev) +
                               " is expected holonomy");
        }
      } else if (name == "lift") {
        lifted.emplace(current, interior_metric_connection(current));
        base_spec_of_lift = spec;
        if (lifted->low_dimension_warning())
          task.notes.push_back(
              "base dimension 3: below the stated range of the construction; "
              "results are still well-defined");
        current = lifted->structure();
        spec = lifted->lifted_spec(spec);
        task.verdict = "pass";
        task.notes.push_back("working structure replaced by its lift (dimension " +
                             std::to_string(lifted->lifted_dim()) + ")");
      } else if (name == "lift-theorems") {
        if (!lifted) {
          lifted.emplace(current, interior_metric_connection(current));
          base_spec_of_lift = spec;
          current = lifted->structure();
          spec = lifted->lifted_spec(spec);
          task.notes.push_back("lift taken implicitly");
        }
        const LiftedBracketResult br =
            lifted_brackets_check(*lifted, base_spec_of_lift, threads);
        const LiftedNijenhuisResult nj =
            lifted_nijenhuis_check(*lifted, base_spec_of_lift, threads);
        const LiftTheoremsResult th =
            check_theorems_9_10(*lifted, base_spec_of_lift, threads);
        task.tolerance = 1e-8;
        const double brackets = std::max({br.q8, br.q9, br.q10});
        const double displays = std::max({nj.eps_eps, nj.fiber_fiber, nj.eps_fiber,
                                          nj.eps_reeb, nj.fiber_reeb});
        task.max_residual = std::max(brackets, displays);
        task.witness = br.witness;
        task.notes.push_back("bracket residuals q8 " + fmt(br.q8) + ", q9 " +
                             fmt(br.q9) + ", q10 " + fmt(br.q10));
        task.notes.push_back("N_J display residual " + fmt(displays));
        task.notes.push_back("non-normality witness " + fmt(nj.n1_witness_norm) +
                             " vs 2 max|omega| " + fmt(nj.two_max_omega));
        task.notes.push_back("base: max|R| " + fmt(th.base_r_max) + ", max|P| " +
                             fmt(th.base_p_max) + ", sasakian " +
                             (th.base_sasakian ? "true" : "false"));
        task.notes.push_back("lifted: P(N_J) " + fmt(th.lifted_pn) +
                             ", dOmega full " + fmt(th.lifted_domega_full) +
                             ", ack " + (th.lifted_ack_full ? "true" : "false"));
        task.notes.push_back(std::string("theorem-10 shape ") +
                             (th.theorem10_consistent ? "consistent" : "inconsistent"));
        const bool witness_ok =
            nj.n1_witness_norm >= nj.two_max_omega - 1e-8;
        task.verdict = (brackets <= 1e-9 && displays <= 1e-8 && witness_ok)
                           ? "pass"
                           : "fail";
      } else {
        task.verdict = "fail";
        task.notes.push_back("unknown task");
      }
    } catch (const std::exception& e) {
      task.verdict = "fail";
      task.notes.push_back(std::string("error: ") + e.what());
    }
    rep.tasks.push_back(std::move(task));
  }

  if (!have_classification && construction_error.empty()) {
    try {
      const ClassificationReport c = classify(current, spec, threads);
      rep.classification = {c.contact_metric.verdict, c.almost_hermitian.verdict,
                            c.normal.verdict,        c.sasakian.verdict,
                            c.ack_full.verdict,      c.ack_horizontal.verdict};
    } catch (const std::exception&) {
      // leave flags false; the task list already records what failed
    }
  }
  if (opts.fd_check && construction_error.empty()) {
    try {
      rep.fd_check = run_fd_check(build_structure(rep.scenario), rep.scenario.sample);
    } catch (const std::exception&) {
      rep.fd_check.present = false;
    }
  }

  rep.measured_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
  return rep;
}

// ---------------------------------------------------------------------------
// serialization

std::string report_to_json(const Report& report) {
  nlohmann::json j;
  nlohmann::json sc;
  sc["name"] = report.scenario.name;
  sc["dim"] = report.scenario.dim;
  sc["points"] = report.scenario.sample.count;
  sc["seed"] = report.scenario.sample.seed;
  sc["tol"] = report.scenario.sample.tolerance;
  sc["tasks"] = report.scenario.tasks;
  nlohmann::json box = nlohmann::json::array();
  for (const auto& iv : report.scenario.sample.box)
    box.push_back({iv[0], iv[1]});
  sc["box"] = box;
  sc["gamma"] = report.scenario.gamma;
  sc["g"] = report.scenario.g;
  sc["phi"] = report.scenario.phi;
  if (!report.scenario.warnings.empty()) sc["warnings"] = report.scenario.warnings;
  j["scenario"] = sc;
  j["version"] = report.version;

  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& t : report.tasks) {
    nlohmann::json tj;
    tj["name"] = t.name;
    tj["verdict"] = t.verdict;
    tj["max_residual"] = t.max_residual;
    tj["tolerance"] = t.tolerance;
    tj["witness"] = t.witness;
    tj["notes"] = t.notes;
    tasks.push_back(tj);
  }
  j["tasks"] = tasks;

  j["classification"] = {
      {"contact_metric", report.classification.contact_metric},
      {"almost_hermitian", report.classification.almost_hermitian},
      {"normal", report.classification.normal},
      {"sasakian", report.classification.sasakian},
      {"ack_full", report.classification.ack_full},
      {"ack_horizontal", report.classification.ack_horizontal},
  };
  if (report.fd_check.present) {
    j["fd_check"] = {{"max_discrepancy", report.fd_check.max_discrepancy},
                     {"points", report.fd_check.points},
                     {"entries", report.fd_check.entries}};
  }
  j["elapsed_ms"] = report.elapsed_ms;
  return j.dump(2) + "\n";
}

std::string report_summary(const Report& report) {
  std::ostringstream os;
  os << "scenario: " << report.scenario.name << " (dim " << report.scenario.dim
     << ", " << report.scenario.sample.count << " points, seed "
     << report.scenario.sample.seed << ", tol "
     << fmt(report.scenario.sample.tolerance) << ")\n";
  for (const auto& w : report.scenario.warnings) os << "  warning: " << w << "\n";
  for (const auto& t : report.tasks) {
    os << "  " << t.name;
    for (size_t i = t.name.size(); i < 14; ++i) os << ' ';
    os << ' ' << t.verdict;
    for (size_t i = t.verdict.size(); i < 5; ++i) os << ' ';
    os << "max_residual " << fmt(t.max_residual) << "  (tol " << fmt(t.tolerance)
       << ")\n";
    for (const auto& n : t.notes) os << "      - " << n << "\n";
  }
  const auto& c = report.classification;
  os << "classification: contact_metric=" << (c.contact_metric ? "yes" : "no")
     << " almost_hermitian=" << (c.almost_hermitian ? "yes" : "no")
     << " normal=" << (c.normal ? "yes" : "no")
     << " sasakian=" << (c.sasakian ? "yes" : "no")
     << " ack_full=" << (c.ack_full ? "yes" : "no")
     << " ack_horizontal=" << (c.ack_horizontal ? "yes" : "no") << "\n";
  if (report.fd_check.present)
    os << "fd-check: max discrepancy " << fmt(report.fd_check.max_discrepancy)
       << " over " << report.fd_check.entries << " fields x "
       << report.fd_check.points << " points\n";
  os << "elapsed: " << report.measured_ms << " ms\n";
  os << "result: " << (report.any_fail() ? "FAIL" : "PASS") << "\n";
  return os.str();
}

}  // namespace acml
