#include "core/sysfile.hpp"

#include <utility>

#include "core/error.hpp"
#include "core/util.hpp"

namespace cms {
namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::ParseError, msg); }

const ojson& need(const ojson& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) bad(where + ": missing \"" + key + "\"");
  return obj[key];
}

int need_int(const ojson& obj, const char* key, const std::string& where) {
  const ojson& v = need(obj, key, where);
  if (!v.is_number_integer()) bad(where + ": \"" + key + "\" must be an integer");
  return v.get<int>();
}

double need_num(const ojson& obj, const char* key, const std::string& where) {
  const ojson& v = need(obj, key, where);
  if (!v.is_number()) bad(where + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

std::string need_str(const ojson& obj, const char* key, const std::string& where) {
  const ojson& v = need(obj, key, where);
  if (!v.is_string()) bad(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

Expr parse_expr(const std::string& text, const std::string& where) {
  try {
    return Expr::parse(text);
  } catch (const Error& e) {
    bad(where + ": " + e.what());
  }
}

MapSpec parse_map(const ojson& j, const Backend& backend, const std::string& where) {
  std::string kind = need_str(j, "kind", where);
  if (kind == "append") return AppendMap{};
  if (kind == "affine") {
    const ojson& rows = need(j, "matrix", where);
    const ojson& off = need(j, "offset", where);
    if (!rows.is_array() || !off.is_array()) bad(where + ": affine needs matrix and offset arrays");
    AffineMap m;
    const int dim = backend.dim;
    if (static_cast<int>(rows.size()) != dim || static_cast<int>(off.size()) != dim)
      bad(where + ": affine map must be " + std::to_string(dim) + "-dimensional");
    for (const ojson& row : rows) {
      if (!row.is_array() || static_cast<int>(row.size()) != dim)
        bad(where + ": matrix rows must have " + std::to_string(dim) + " entries");
      for (const ojson& v : row) {
        if (!v.is_number()) bad(where + ": matrix entries must be numbers");
        m.matrix.push_back(v.get<double>());
      }
    }
    for (const ojson& v : off) {
      if (!v.is_number()) bad(where + ": offset entries must be numbers");
      m.offset.push_back(v.get<double>());
    }
    return m;
  }
  if (kind == "expr") {
    const ojson& coords = need(j, "coords", where);
    if (!coords.is_array() || coords.empty()) bad(where + ": expr map needs a coords array");
    ExprMap m;
    for (const ojson& c : coords) {
      if (!c.is_string()) bad(where + ": coords must be strings");
      m.coords.push_back(parse_expr(c.get<std::string>(), where));
    }
    return m;
  }
  bad(where + ": unknown map kind \"" + kind + "\"");
}

}  // namespace

System parse_system_text(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const std::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("top level must be an object");

  const ojson& space = need(j, "space", "space");
  Backend backend;
  std::string kind = need_str(space, "backend", "space");
  if (kind == "euclid") {
    backend.kind = Backend::Kind::Euclid;
    backend.dim = need_int(space, "dim", "space");
    const ojson& box = need(space, "box", "space");
    if (!box.is_array() || static_cast<int>(box.size()) != backend.dim)
      bad("space: box needs one [lo,hi] pair per dimension");
    for (const ojson& side : box) {
      if (!side.is_array() || side.size() != 2 || !side[0].is_number() || !side[1].is_number())
        bad("space: box entries must be [lo,hi] number pairs");
      backend.box.push_back({side[0].get<double>(), side[1].get<double>()});
    }
  } else if (kind == "word") {
    backend.kind = Backend::Kind::Word;
    backend.word_capacity = need_int(space, "capacity", "space");
  } else {
    bad("space: unknown backend \"" + kind + "\"");
  }

  const ojson& jverts = need(j, "vertices", "vertices");
  if (!jverts.is_array() || jverts.empty()) bad("vertices must be a nonempty array");
  const int n = static_cast<int>(jverts.size());
  std::vector<Region> regions;
  for (int i = 0; i < n; ++i) {
    std::string where = "vertex " + std::to_string(i + 1);
    if (need_int(jverts[i], "id", where) != i + 1)
      bad(where + ": ids must be 1..N in order");
    std::string text_i = need_str(jverts[i], "region", where);
    if (backend.kind == Backend::Kind::Word) {
      if (text_i != "auto") bad(where + ": word regions must be \"auto\"");
      regions.push_back(word_region());
    } else {
      Region r;
      r.pred = parse_expr(text_i, where);
      r.text = std::move(text_i);
      regions.push_back(std::move(r));
    }
  }

  const ojson& jedges = need(j, "edges", "edges");
  if (!jedges.is_array() || jedges.empty()) bad("edges must be a nonempty array");
  std::vector<Edge> edges;
  std::vector<MapSpec> maps;
  std::vector<ProbSpec> probs;
  for (std::size_t i = 0; i < jedges.size(); ++i) {
    std::string where = "edge " + std::to_string(i);
    if (need_int(jedges[i], "id", where) != static_cast<int>(i))
      bad(where + ": ids must be 0..E-1 in order");
    edges.push_back({static_cast<EdgeId>(i), need_int(jedges[i], "source", where),
                     need_int(jedges[i], "target", where)});
    maps.push_back(parse_map(need(jedges[i], "map", where), backend, where));
    probs.push_back(ProbSpec{parse_expr(need_str(jedges[i], "prob", where), where)});
  }

  const ojson& jbase = need(j, "base_points", "base_points");
  if (!jbase.is_array() || static_cast<int>(jbase.size()) != n)
    bad("base_points needs exactly one entry per vertex");
  std::vector<Point> base_points(static_cast<std::size_t>(n));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const ojson& b : jbase) {
    std::string where = "base_points";
    int v = need_int(b, "vertex", where);
    if (v < 1 || v > n) bad(where + ": vertex out of range");
    if (seen[static_cast<std::size_t>(v - 1)]) bad(where + ": duplicate vertex " + std::to_string(v));
    seen[static_cast<std::size_t>(v - 1)] = true;
    where += " (vertex " + std::to_string(v) + ")";
    if (backend.kind == Backend::Kind::Euclid) {
      const ojson& pt = need(b, "point", where);
      if (!pt.is_array() || static_cast<int>(pt.size()) != backend.dim)
        bad(where + ": point needs " + std::to_string(backend.dim) + " coordinates");
      std::vector<double> coords;
      for (const ojson& c : pt) {
        if (!c.is_number()) bad(where + ": coordinates must be numbers");
        coords.push_back(c.get<double>());
      }
      base_points[static_cast<std::size_t>(v - 1)] = Point::euclid(std::move(coords));
    } else {
      base_points[static_cast<std::size_t>(v - 1)] =
          Point::word(parse_word(need_str(b, "word", where)));
    }
  }

  const ojson& params = need(j, "params", "params");
  double delta = need_num(params, "delta", "params");
  std::optional<double> claimed;
  if (params.contains("claimed_rate")) {
    if (!params["claimed_rate"].is_number()) bad("params: claimed_rate must be a number");
    claimed = params["claimed_rate"].get<double>();
  }
  ojson extra = ojson::object();
  for (auto it = params.begin(); it != params.end(); ++it)
    if (it.key() != "delta" && it.key() != "claimed_rate") extra[it.key()] = it.value();

  return System(Digraph(n, std::move(edges)), std::move(backend), std::move(regions),
                std::move(maps), std::move(probs), std::move(base_points), delta, claimed,
                std::move(extra));
}

System parse_system_file(const std::string& path) {
  try {
    return parse_system_text(read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    fail(e.code(), path + ": " + e.what());
  }
}

ojson system_to_json(const System& sys) {
  ojson j;
  const Backend& backend = sys.backend();
  if (sys.is_euclid()) {
    j["space"] = {{"backend", "euclid"}, {"dim", backend.dim}};
    ojson box = ojson::array();
    for (const auto& side : backend.box) box.push_back({side[0], side[1]});
    j["space"]["box"] = std::move(box);
  } else {
    j["space"] = {{"backend", "word"}, {"capacity", backend.word_capacity}};
  }

  ojson verts = ojson::array();
  for (int v = 1; v <= sys.graph().vertex_count(); ++v)
    verts.push_back({{"id", v}, {"region", sys.region(v).text}});
  j["vertices"] = std::move(verts);

  ojson edges = ojson::array();
  for (const Edge& e : sys.graph().edges()) {
    ojson map;
    const MapSpec& spec = sys.map(e.id);
    if (const auto* affine = std::get_if<AffineMap>(&spec)) {
      map["kind"] = "affine";
      ojson rows = ojson::array();
      for (int r = 0; r < backend.dim; ++r) {
        ojson row = ojson::array();
        for (int c = 0; c < backend.dim; ++c)
          row.push_back(affine->matrix[static_cast<std::size_t>(r * backend.dim + c)]);
        rows.push_back(std::move(row));
      }
      map["matrix"] = std::move(rows);
      map["offset"] = affine->offset;
    } else if (const auto* expr = std::get_if<ExprMap>(&spec)) {
      map["kind"] = "expr";
      ojson coords = ojson::array();
      for (const Expr& c : expr->coords) coords.push_back(c.text());
      map["coords"] = std::move(coords);
    } else {
      map["kind"] = "append";
    }
    edges.push_back({{"id", e.id},
                     {"source", e.source},
                     {"target", e.target},
                     {"map", std::move(map)},
                     {"prob", sys.prob(e.id).expr.text()}});
  }
  j["edges"] = std::move(edges);

  ojson base = ojson::array();
  for (int v = 1; v <= sys.graph().vertex_count(); ++v) {
    const Point& p = sys.base_point(v);
    if (sys.is_euclid())
      base.push_back({{"vertex", v}, {"point", p.coords}});
    else
      base.push_back({{"vertex", v}, {"word", format_word(p.symbols)}});
  }
  j["base_points"] = std::move(base);

  ojson params;
  params["delta"] = sys.delta();
  if (sys.claimed_rate()) params["claimed_rate"] = *sys.claimed_rate();
  for (auto it = sys.extra().begin(); it != sys.extra().end(); ++it)
    params[it.key()] = it.value();
  j["params"] = std::move(params);
  return j;
}

std::string emit_system_text(const System& sys) { return system_to_json(sys).dump(2) + "\n"; }

void write_system_file(const System& sys, const std::string& path) {
  write_text_file(path, emit_system_text(sys));
}

Point parse_start_spec(const System& sys, const std::string& spec) {
  if (spec.rfind("vertex:", 0) == 0) {
    int v = 0;
    try {
      v = std::stoi(spec.substr(7));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad start spec \"" + spec + "\"");
    }
    if (v < 1 || v > sys.graph().vertex_count())
      fail(ErrorCode::InvalidArgument, "start vertex out of range");
    return sys.base_point(v);
  }
  if (sys.is_euclid()) {
    std::vector<double> coords;
    std::size_t start = 0;
    try {
      while (start <= spec.size()) {
        std::size_t pos = spec.find(',', start);
        coords.push_back(std::stod(spec.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad coordinate list \"" + spec + "\"");
    }
    if (static_cast<int>(coords.size()) != sys.backend().dim)
      fail(ErrorCode::InvalidArgument, "start point needs " +
                                           std::to_string(sys.backend().dim) + " coordinates");
    return Point::euclid(std::move(coords));
  }
  return Point::word(parse_word(spec));
}

}  // namespace cms
