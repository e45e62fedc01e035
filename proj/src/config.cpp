#include "oco/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace oco {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a table");
  return j;
}

// Unknown keys are fatal; the suggestion comes from the allowed set.
void check_keys(const json& j, const std::string& path, const std::vector<std::string>& allowed) {
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) != allowed.end()) continue;
    std::string message = "unknown field '" + item.key() + "'";
    const std::string hint = suggest_key(item.key(), allowed);
    if (!hint.empty()) message += " (did you mean '" + hint + "'?)";
    fail(path, message);
  }
}

const json& field(const json& j, const std::string& key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) fail(path, "missing required field '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double number_field(const json& j, const std::string& key, const std::string& path) {
  return number(field(j, key, path), join(path, key));
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail(path, "integer out of range");
  return static_cast<int>(v);
}

int integer_field(const json& j, const std::string& key, const std::string& path) {
  return integer(field(j, key, path), join(path, key));
}

std::string string_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

Vec vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], index_path(path, i));
  return v;
}

Vec vector_field(const json& j, const std::string& key, const std::string& path) {
  return vector(field(j, key, path), join(path, key));
}

std::vector<Vec> points(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of points");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(vector(j[i], index_path(path, i)));
    if (out.back().size() != out.front().size()) fail(index_path(path, i), "dimension differs from the first point");
  }
  return out;
}

std::vector<Vec> points_field(const json& j, const std::string& key, const std::string& path) {
  return points(field(j, key, path), join(path, key));
}

Mat matrix_field(const json& j, const std::string& key, const std::string& path) {
  const auto rows = points_field(j, key, path);
  Mat m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

std::string kind_of(const json& j, const std::string& path, const std::vector<std::string>& kinds) {
  require_object(j, path);
  const std::string kind = string_field(j, "kind", path);
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    std::string message = "unknown kind '" + kind + "'";
    const std::string hint = suggest_key(kind, kinds);
    if (!hint.empty()) message += " (did you mean '" + hint + "'?)";
    fail(join(path, "kind"), message);
  }
  return kind;
}

// Re-raises component validation failures under the section path.
template <class F>
auto wrapped(const std::string& path, F&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
    std::string detail = e.what();
    const auto pos = detail.find("parse error");
    if (pos != std::string::npos) detail = detail.substr(pos);
    throw ConfigError("line " + std::to_string(line) + ": syntax error: " + detail);
  }
}

const std::vector<std::string> kTopKeys = {"game", "player", "adversary", "horizons", "trials", "seed", "output"};

void check_game_keys(const json& game) {
  require_object(game, "game");
  check_keys(game, "game", {"loss", "opponents", "decisions"});
}

}  // namespace

std::string suggest_key(const std::string& key, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_distance = 3;
  for (const auto& c : candidates) {
    std::vector<std::size_t> row(c.size() + 1);
    for (std::size_t j = 0; j <= c.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= key.size(); ++i) {
      std::size_t diag = row[0];
      row[0] = i;
      for (std::size_t j = 1; j <= c.size(); ++j) {
        const std::size_t up = row[j];
        row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (key[i - 1] == c[j - 1] ? 0 : 1)});
        diag = up;
      }
    }
    if (row[c.size()] < best_distance) {
      best_distance = row[c.size()];
      best = c;
    }
  }
  return best;
}

bool ExperimentSpec::operator==(const ExperimentSpec& other) const { return render(*this) == render(other); }

DecisionSet build_decision_set(const json& j, const std::string& path) {
  const std::string kind =
      kind_of(j, path, {"simplex", "box", "interval", "l2_ball", "lp_ball", "polytope", "ellipsoid"});
  DecisionSet set;
  if (kind == "simplex") {
    check_keys(j, path, {"kind", "dim"});
    set = Simplex{integer_field(j, "dim", path)};
  } else if (kind == "box") {
    check_keys(j, path, {"kind", "lo", "hi"});
    set = Box{vector_field(j, "lo", path), vector_field(j, "hi", path)};
  } else if (kind == "interval") {
    check_keys(j, path, {"kind", "lo", "hi"});
    set = Interval{number_field(j, "lo", path), number_field(j, "hi", path)};
  } else if (kind == "l2_ball") {
    check_keys(j, path, {"kind", "center", "radius"});
    set = L2Ball{vector_field(j, "center", path), number_field(j, "radius", path)};
  } else if (kind == "lp_ball") {
    check_keys(j, path, {"kind", "p", "radius", "dim"});
    set = LpBall{number_field(j, "p", path), number_field(j, "radius", path), integer_field(j, "dim", path)};
  } else if (kind == "polytope") {
    check_keys(j, path, {"kind", "points"});
    set = VertexPolytope{points_field(j, "points", path)};
  } else {
    check_keys(j, path, {"kind", "center", "shape", "radius"});
    set = Ellipsoid{vector_field(j, "center", path), matrix_field(j, "shape", path), number_field(j, "radius", path)};
  }
  wrapped(path, [&] {
    validate(set);
    return 0;
  });
  return set;
}

OpponentSet build_opponent_set(const json& j, const std::string& path) {
  const std::string kind = kind_of(j, path, {"points", "ball", "box", "hull"});
  if (kind == "points") {
    check_keys(j, path, {"kind", "points"});
    return FinitePoints{points_field(j, "points", path)};
  }
  if (kind == "ball") {
    check_keys(j, path, {"kind", "center", "radius"});
    const double radius = number_field(j, "radius", path);
    if (!(radius >= 0.0)) fail(join(path, "radius"), "must be >= 0");
    return BallRegion{vector_field(j, "center", path), radius};
  }
  if (kind == "box") {
    check_keys(j, path, {"kind", "lo", "hi"});
    BoxRegion box{vector_field(j, "lo", path), vector_field(j, "hi", path)};
    if (box.lo.size() != box.hi.size() || (box.hi - box.lo).minCoeff() < 0.0) fail(path, "need lo <= hi componentwise");
    return box;
  }
  check_keys(j, path, {"kind", "points"});
  return HullRegion{points_field(j, "points", path)};
}

LossFunction build_loss(const json& j, int dim_hint, const std::string& path) {
  const std::string kind = kind_of(j, path,
                                   {"linear", "hinge", "multiclass_hinge", "absolute", "canonical_pwl", "two_stage",
                                    "security", "congestion"});
  if (kind == "linear") {
    check_keys(j, path, {"kind", "dim"});
    return LinearLoss{j.contains("dim") ? integer_field(j, "dim", path) : dim_hint};
  }
  if (kind == "hinge") {
    check_keys(j, path, {"kind", "features"});
    return HingeLoss{j.contains("features") ? integer_field(j, "features", path) : 0};
  }
  if (kind == "absolute") {
    check_keys(j, path, {"kind", "features"});
    return AbsoluteLoss{j.contains("features") ? integer_field(j, "features", path) : 0};
  }
  if (kind == "multiclass_hinge") {
    check_keys(j, path, {"kind", "classes", "features"});
    return MulticlassHingeLoss{integer_field(j, "classes", path), integer_field(j, "features", path)};
  }
  if (kind == "canonical_pwl") {
    check_keys(j, path, {"kind", "records"});
    const json& records = field(j, "records", path);
    const std::string rpath = join(path, "records");
    if (!records.is_array() || records.empty()) fail(rpath, "expected a nonempty array of records");
    CanonicalPwl spec;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const std::string p = index_path(rpath, i);
      require_object(records[i], p);
      check_keys(records[i], p, {"z", "C", "c", "scenarios"});
      spec.records.push_back({vector_field(records[i], "z", p), matrix_field(records[i], "C", p),
                              vector_field(records[i], "c", p), points_field(records[i], "scenarios", p)});
    }
    return spec;
  }
  if (kind == "two_stage") {
    check_keys(j, path, {"kind", "c1", "c2", "A", "B", "x_lower", "x_upper", "dual_vertices"});
    TwoStageSpec spec;
    spec.c1 = vector_field(j, "c1", path);
    spec.c2 = vector_field(j, "c2", path);
    spec.A = matrix_field(j, "A", path);
    spec.B = matrix_field(j, "B", path);
    // Bounds may use null for an infinite side.
    auto bounds = [&](const std::string& key, double missing) {
      Vec v = Vec::Constant(spec.c2.size(), missing);
      if (!j.contains(key)) return v;
      const json& arr = j.at(key);
      const std::string p = join(path, key);
      if (!arr.is_array() || arr.size() != static_cast<std::size_t>(spec.c2.size())) fail(p, "expected one bound per recourse variable");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_null()) v(static_cast<Eigen::Index>(i)) = number(arr[i], index_path(p, i));
      }
      return v;
    };
    spec.x_lower = bounds("x_lower", -kInf);
    spec.x_upper = bounds("x_upper", kInf);
    if (j.contains("dual_vertices")) spec.dual_vertices = points_field(j, "dual_vertices", path);
    return spec;
  }
  if (kind == "security") {
    check_keys(j, path, {"kind", "graph", "graph_file", "path_cap"});
    if (j.contains("graph") == j.contains("graph_file")) fail(path, "give exactly one of 'graph' and 'graph_file'");
    const auto cap = j.contains("path_cap") ? integer_field(j, "path_cap", path) : 100000;
    if (cap < 1) fail(join(path, "path_cap"), "must be >= 1");
    const std::string text =
        j.contains("graph") ? string_field(j, "graph", path)
                            : wrapped(join(path, "graph_file"), [&] { return read_file(string_field(j, "graph_file", path)); });
    return wrapped(path, [&] { return parse_security_graph(text, static_cast<std::size_t>(cap)); });
  }
  check_keys(j, path, {"kind", "arcs"});
  const json& arcs = field(j, "arcs", path);
  const std::string apath = join(path, "arcs");
  if (!arcs.is_array() || arcs.empty()) fail(apath, "expected a nonempty array of arcs");
  CongestionSpec spec;
  for (std::size_t e = 0; e < arcs.size(); ++e) {
    const auto pieces = points(arcs[e], index_path(apath, e));
    std::vector<LatencyPiece> latency;
    for (const auto& piece : pieces) {
      if (piece.size() != 2) fail(index_path(apath, e), "each piece is [slope, offset]");
      latency.push_back({piece(0), piece(1)});
    }
    spec.arcs.push_back(latency);
  }
  return spec;
}

Game build_game(const json& game) {
  check_game_keys(game);
  DecisionSet set = build_decision_set(field(game, "decisions", "game"));
  OpponentSet zset = build_opponent_set(field(game, "opponents", "game"));
  LossFunction loss = build_loss(field(game, "loss", "game"), dimension(set));
  return wrapped("game", [&] { return make_game(std::move(loss), std::move(zset), std::move(set)); });
}

std::unique_ptr<Player> build_player(const json& j) {
  const std::string path = "player";
  const std::string kind = kind_of(j, path, {"ftl", "ogd", "exp_weights", "constant"});
  if (kind == "ftl") {
    check_keys(j, path, {"kind"});
    return std::make_unique<FtlPlayer>();
  }
  if (kind == "ogd") {
    check_keys(j, path, {"kind", "eta", "gradient_bound"});
    const double eta = j.contains("eta") ? number_field(j, "eta", path) : 0.0;
    const double g = j.contains("gradient_bound") ? number_field(j, "gradient_bound", path) : 1.0;
    if (!(g > 0.0)) fail(join(path, "gradient_bound"), "must be > 0");
    return std::make_unique<OgdPlayer>(eta, g);
  }
  if (kind == "exp_weights") {
    check_keys(j, path, {"kind", "eta"});
    const double eta = number_field(j, "eta", path);
    if (!(eta > 0.0)) fail(join(path, "eta"), "must be > 0");
    return std::make_unique<ExpWeightsPlayer>(eta);
  }
  check_keys(j, path, {"kind", "point"});
  return std::make_unique<ConstantPlayer>(vector_field(j, "point", path));
}

std::unique_ptr<Adversary> build_adversary(const json& j, const Game& game) {
  const std::string path = "adversary";
  const std::string kind = kind_of(
      j, path, {"ct", "iid", "iid_region", "sphere", "segment", "equalizer", "fixed", "critical_alpha"});
  const int dz = game.dim_z();
  auto check_dim = [&](const Vec& v, const std::string& key) {
    if (v.size() != dz) fail(join(path, key), "dimension " + std::to_string(v.size()) + " != " + std::to_string(dz));
    return v;
  };
  if (kind == "ct") {
    check_keys(j, path, {"kind", "z_star", "alpha", "e"});
    const Vec z_star = check_dim(vector_field(j, "z_star", path), "z_star");
    const Vec e = check_dim(vector_field(j, "e", path), "e");
    const double alpha = number_field(j, "alpha", path);
    return wrapped(path, [&]() -> std::unique_ptr<Adversary> { return std::make_unique<CtAdversary>(z_star, alpha, e); });
  }
  if (kind == "iid") {
    check_keys(j, path, {"kind", "points", "p"});
    const auto pts = points_field(j, "points", path);
    check_dim(pts.front(), "points");
    std::vector<double> p(pts.size(), 1.0 / static_cast<double>(pts.size()));
    if (j.contains("p")) {
      const Vec pv = vector_field(j, "p", path);
      p.assign(pv.data(), pv.data() + pv.size());
    }
    return wrapped(path, [&]() -> std::unique_ptr<Adversary> { return std::make_unique<IidFiniteAdversary>(pts, p); });
  }
  if (kind == "iid_region") {
    check_keys(j, path, {"kind", "region"});
    OpponentSet region = j.contains("region") ? build_opponent_set(j.at("region"), join(path, "region")) : game.opponents();
    if (dimension(region) != dz) fail(join(path, "region"), "dimension differs from the game");
    return std::make_unique<IidRegionAdversary>(std::move(region));
  }
  if (kind == "sphere") {
    check_keys(j, path, {"kind", "center", "radius"});
    const double radius = number_field(j, "radius", path);
    if (!(radius >= 0.0)) fail(join(path, "radius"), "must be >= 0");
    return std::make_unique<IidSphereAdversary>(check_dim(vector_field(j, "center", path), "center"), radius);
  }
  if (kind == "segment") {
    check_keys(j, path, {"kind", "a", "b"});
    return std::make_unique<SegmentAdversary>(check_dim(vector_field(j, "a", path), "a"),
                                              check_dim(vector_field(j, "b", path), "b"));
  }
  if (kind == "equalizer") {
    check_keys(j, path, {"kind", "eps", "z", "e", "f1", "f2"});
    const double eps = number_field(j, "eps", path);
    const int given = static_cast<int>(j.contains("z")) + j.contains("e") + j.contains("f1") + j.contains("f2");
    if (given != 0 && given != 4) fail(path, "give all of z, e, f1, f2 or none of them");
    return wrapped(path, [&]() -> std::unique_ptr<Adversary> {
      if (given == 0) return std::make_unique<EqualizerAdversary>(synthesize_equalizer(game, eps));
      EqualizerConfig cfg{vector_field(j, "z", path), vector_field(j, "e", path), eps, vector_field(j, "f1", path),
                          vector_field(j, "f2", path)};
      validate_equalizer(cfg, game);
      return std::make_unique<EqualizerAdversary>(cfg);
    });
  }
  if (kind == "fixed") {
    check_keys(j, path, {"kind", "sequence"});
    const auto seq = points_field(j, "sequence", path);
    check_dim(seq.front(), "sequence");
    return std::make_unique<FixedAdversary>(seq);
  }
  check_keys(j, path, {"kind", "p1"});
  std::optional<std::vector<double>> p1;
  if (j.contains("p1")) {
    const Vec v = vector_field(j, "p1", path);
    p1 = std::vector<double>(v.data(), v.data() + v.size());
  }
  return wrapped(path, [&]() -> std::unique_ptr<Adversary> {
    const auto ca = critical_alpha(game, p1);
    return std::make_unique<IidFiniteAdversary>(std::get<FinitePoints>(game.opponents()).points, ca.p);
  });
}

ExperimentSpec parse_config(const std::string& text) {
  const json doc = parse_text(text);
  require_object(doc, "config");
  check_keys(doc, "config", kTopKeys);
  ExperimentSpec spec;
  spec.game = field(doc, "game", "config");
  spec.player = field(doc, "player", "config");
  spec.adversary = field(doc, "adversary", "config");

  const json& horizons = field(doc, "horizons", "config");
  if (!horizons.is_array() || horizons.empty()) fail("horizons", "expected a nonempty array of integers");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    const int t = integer(horizons[i], index_path("horizons", i));
    if (t < 1) fail(index_path("horizons", i), "must be >= 1");
    if (!spec.horizons.empty() && t <= spec.horizons.back()) fail("horizons", "must be strictly increasing");
    spec.horizons.push_back(t);
  }
  spec.trials = integer(field(doc, "trials", "config"), "trials");
  if (spec.trials < 1) fail("trials", "must be >= 1");
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0)) {
      fail("seed", "expected a non-negative 64-bit integer");
    }
    spec.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("output")) spec.output = string_field(doc, "output", "config");

  const Game game = build_game(spec.game);
  build_player(spec.player);
  build_adversary(spec.adversary, game);
  return spec;
}

json parse_game_config(const std::string& text) {
  const json doc = parse_text(text);
  require_object(doc, "config");
  check_keys(doc, "config", kTopKeys);
  const json& game = field(doc, "game", "config");
  check_game_keys(game);
  DecisionSet set;
  bool have_set = false;
  if (game.contains("decisions")) {
    set = build_decision_set(game.at("decisions"));
    have_set = true;
  }
  if (game.contains("opponents")) build_opponent_set(game.at("opponents"));
  if (game.contains("loss")) build_loss(game.at("loss"), have_set ? dimension(set) : 0);
  return game;
}

std::string render(const ExperimentSpec& spec) {
  json doc;
  doc["game"] = spec.game;
  doc["player"] = spec.player;
  doc["adversary"] = spec.adversary;
  doc["horizons"] = spec.horizons;
  doc["trials"] = spec.trials;
  doc["seed"] = spec.seed;
  doc["output"] = spec.output;
  return doc.dump(2) + "\n";
}

RunOutcome run_experiment(const ExperimentSpec& spec, int threads) {
  namespace fs = std::filesystem;
  const Game game = build_game(spec.game);
  const auto player = build_player(spec.player);
  const auto adversary = build_adversary(spec.adversary, game);

  std::vector<TrialRecord> records;
  RunOutcome outcome;
  outcome.sweep = run_sweep(game, *player, *adversary, spec.horizons, spec.trials, spec.seed, threads, &records);

  const fs::path dir(spec.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
  outcome.csv_path = (dir / "trials.csv").string();
  outcome.summary_path = (dir / "summary.json").string();
  write_file_atomic(outcome.csv_path, trials_csv(records));
  try {
    write_file_atomic(outcome.summary_path, summary_json(outcome.sweep));
  } catch (...) {
    fs::remove(outcome.csv_path, ec);
    throw;
  }
  return outcome;
}

}  // namespace oco
