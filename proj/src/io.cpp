#include "rparallel/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rparallel/error.hpp"

namespace rparallel::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Line reader that skips blanks and '#' comments and remembers the line number.
class LineReader {
 public:
  LineReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }

  std::string require() {
    std::string line;
    if (!next(line)) fail("unexpected end of file");
    return line;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(what_ + ":" + std::to_string(number_) + ": " + message);
  }

 private:
  std::istream& in_;
  std::string what_;
  std::size_t number_ = 0;
};

Vec3 parse_vertex(LineReader& reader, const std::string& line) {
  std::istringstream s(line);
  Vec3 p;
  if (!(s >> p.x >> p.y)) reader.fail("expected vertex coordinates");
  if (!(s >> p.z)) p.z = 0.0;
  return p;
}

}  // namespace

MeshData read_off(std::istream& in) {
  LineReader reader(in, "OFF");
  MeshData mesh;
  std::string line = reader.require();
  std::istringstream head(line);
  std::string magic;
  head >> magic;
  if (magic != "OFF") reader.fail("missing OFF header");
  std::size_t nv = 0, nf = 0;
  if (!(head >> nv >> nf)) {
    std::istringstream counts(reader.require());
    if (!(counts >> nv >> nf)) reader.fail("expected vertex and face counts");
  }
  mesh.vertices.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) mesh.vertices.push_back(parse_vertex(reader, reader.require()));
  for (std::size_t i = 0; i < nf; ++i) {
    std::istringstream s(reader.require());
    std::size_t k = 0;
    if (!(s >> k) || k < 2) reader.fail("expected a face with at least 2 vertices");
    std::vector<Index> face(k);
    for (auto& idx : face) {
      long long v = -1;
      if (!(s >> v) || v < 0) reader.fail("expected a nonnegative vertex index");
      idx = static_cast<Index>(v);
    }
    mesh.faces.push_back(std::move(face));
  }
  return mesh;
}

MeshData read_ply(std::istream& in) {
  LineReader reader(in, "PLY");
  if (reader.require() != "ply") reader.fail("missing ply magic");
  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
    std::vector<bool> is_list;
  };
  std::vector<Element> elements;
  for (;;) {
    std::string line = reader.require();
    std::istringstream s(line);
    std::string key;
    s >> key;
    if (key == "end_header") break;
    if (key == "format") {
      std::string format;
      s >> format;
      if (format != "ascii") reader.fail("only ASCII PLY is supported");
    } else if (key == "element") {
      Element e;
      if (!(s >> e.name >> e.count)) reader.fail("malformed element line");
      elements.push_back(e);
    } else if (key == "property") {
      if (elements.empty()) reader.fail("property before any element");
      std::string type, name;
      s >> type;
      bool list = type == "list";
      if (list) {
        std::string count_type, item_type;
        s >> count_type >> item_type;
      }
      s >> name;
      elements.back().properties.push_back(name);
      elements.back().is_list.push_back(list);
    } else if (key != "comment" && key != "obj_info") {
      reader.fail("unknown header line '" + key + "'");
    }
  }
  MeshData mesh;
  for (const auto& e : elements) {
    for (std::size_t i = 0; i < e.count; ++i) {
      std::istringstream s(reader.require());
      if (e.name == "vertex") {
        Vec3 p;
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          double value = 0.0;
          if (e.is_list[k]) reader.fail("list properties on vertices are not supported");
          if (!(s >> value)) reader.fail("missing vertex property '" + e.properties[k] + "'");
          if (e.properties[k] == "x") p.x = value;
          if (e.properties[k] == "y") p.y = value;
          if (e.properties[k] == "z") p.z = value;
        }
        mesh.vertices.push_back(p);
      } else if (e.name == "face") {
        bool found = false;
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          if (!e.is_list[k]) {
            double skip;
            s >> skip;
            continue;
          }
          std::size_t n = 0;
          if (!(s >> n) || n < 2) reader.fail("expected a face list with at least 2 indices");
          std::vector<Index> face(n);
          for (auto& idx : face) {
            long long v = -1;
            if (!(s >> v) || v < 0) reader.fail("expected a nonnegative vertex index");
            idx = static_cast<Index>(v);
          }
          if (!found) mesh.faces.push_back(std::move(face));
          found = true;
        }
        if (!found) reader.fail("face element has no index list");
      }
    }
  }
  return mesh;
}

MeshData read_mesh_data(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file " + path.string());
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  try {
    if (ext == ".off") return read_off(in);
    if (ext == ".ply") return read_ply(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  throw ParseError("unknown mesh format '" + ext + "' for " + path.string());
}

std::vector<Index> read_interior(std::istream& in, int dim) {
  LineReader reader(in, "SIMPLICES");
  std::istringstream head(reader.require());
  std::string magic;
  int file_dim = 0;
  std::size_t count = 0;
  if (!(head >> magic >> file_dim >> count) || magic != "SIMPLICES") reader.fail("expected 'SIMPLICES <dim> <count>'");
  if (file_dim != dim) reader.fail("interior dimension " + std::to_string(file_dim) + " does not match " + std::to_string(dim));
  std::vector<Index> indices;
  indices.reserve(count * (dim + 1));
  for (std::size_t i = 0; i < count; ++i) {
    std::istringstream s(reader.require());
    for (int k = 0; k <= dim; ++k) {
      long long v = -1;
      if (!(s >> v) || v < 0) reader.fail("expected " + std::to_string(dim + 1) + " vertex indices");
      indices.push_back(static_cast<Index>(v));
    }
  }
  return indices;
}

void write_interior(std::ostream& out, const SimplicialComplex& c) {
  out << "SIMPLICES " << c.dim() << ' ' << c.interior_size() << '\n';
  for (std::size_t i = 0; i < c.interior_size(); ++i) {
    auto s = c.interior_simplex(i);
    for (std::size_t k = 0; k < s.size(); ++k) out << (k ? " " : "") << s[k];
    out << '\n';
  }
}

SimplicialComplex read_complex(const fs::path& boundary, int dim, const std::optional<fs::path>& interior) {
  MeshData data = read_mesh_data(boundary);
  std::vector<Index> facets;
  for (std::size_t f = 0; f < data.faces.size(); ++f) {
    const auto& face = data.faces[f];
    if (static_cast<int>(face.size()) != dim) {
      throw ParseError(boundary.string() + ": face " + std::to_string(f) + " has " + std::to_string(face.size()) +
                       " vertices, expected " + std::to_string(dim));
    }
    facets.insert(facets.end(), face.begin(), face.end());
  }
  std::vector<Index> cells;
  if (interior) {
    std::ifstream in(*interior);
    if (!in) throw ParseError("cannot open interior file " + interior->string());
    try {
      cells = read_interior(in, dim);
    } catch (const ParseError& e) {
      throw ParseError(interior->string() + ": " + e.what());
    }
  }
  if (dim == 2) {
    for (const auto& v : data.vertices) {
      if (v.z != 0.0) throw ParseError(boundary.string() + ": planar mesh has a vertex with z != 0");
    }
  }
  return SimplicialComplex(dim, std::move(data.vertices), std::move(facets), std::move(cells));
}

std::string format_number(double v) {
  if (is_missing(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_off(std::ostream& out, const SimplicialComplex& c) {
  out << "OFF\n" << c.vertices().size() << ' ' << c.boundary_size() << " 0\n";
  for (const auto& v : c.vertices()) {
    out << format_number(v.x) << ' ' << format_number(v.y) << ' ' << format_number(v.z) << '\n';
  }
  for (std::size_t i = 0; i < c.boundary_size(); ++i) {
    auto s = c.boundary_simplex(i);
    out << s.size();
    for (Index idx : s) out << ' ' << idx;
    out << '\n';
  }
}

void write_ply(std::ostream& out, const SimplicialComplex& c) {
  out << "ply\nformat ascii 1.0\nelement vertex " << c.vertices().size()
      << "\nproperty double x\nproperty double y\nproperty double z\nelement face " << c.boundary_size()
      << "\nproperty list uchar int vertex_indices\nend_header\n";
  for (const auto& v : c.vertices()) {
    out << format_number(v.x) << ' ' << format_number(v.y) << ' ' << format_number(v.z) << '\n';
  }
  for (std::size_t i = 0; i < c.boundary_size(); ++i) {
    auto s = c.boundary_simplex(i);
    out << s.size();
    for (Index idx : s) out << ' ' << idx;
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Scene JSON

namespace {

Vec3 to_vec(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw ParseError(where + ": expected an array of " + std::to_string(dim) + " numbers");
  }
  Vec3 v;
  for (int a = 0; a < dim; ++a) {
    if (!j[a].is_number()) throw ParseError(where + ": expected a number");
    v[a] = j[a].get<double>();
  }
  return v;
}

json from_vec(const Vec3& v, int dim) {
  json j = json::array();
  for (int a = 0; a < dim; ++a) j.push_back(v[a]);
  return j;
}

Window to_window(const json& j, int dim, const std::string& where) {
  if (!j.is_object() || !j.contains("lower") || !j.contains("upper")) {
    throw ParseError(where + ": expected {\"lower\": [...], \"upper\": [...]}");
  }
  try {
    return Window(dim, to_vec(j["lower"], dim, where + ".lower"), to_vec(j["upper"], dim, where + ".upper"));
  } catch (const ValidationError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

json from_window(const Window& w) { return {{"lower", from_vec(w.lower, w.dim)}, {"upper", from_vec(w.upper, w.dim)}}; }

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return obj[key];
}

}  // namespace

GermGrainScene parse_scene(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  const std::string where = path.string();
  const json& dim_j = field(doc, "dim", where);
  if (!dim_j.is_number_integer() || (dim_j.get<int>() != 2 && dim_j.get<int>() != 3)) {
    throw ParseError(where + ": 'dim' must be 2 or 3");
  }
  const int dim = dim_j.get<int>();
  Window window = to_window(field(doc, "window", where), dim, where + ": window");
  Window extended = to_window(field(doc, "extended_window", where), dim, where + ": extended_window");
  std::optional<std::uint64_t> seed;
  if (doc.contains("seed")) seed = doc["seed"].get<std::uint64_t>();

  const fs::path base = path.parent_path();
  std::map<std::pair<std::string, std::string>, MeshPtr> cache;
  auto load_mesh = [&](const std::string& source, const std::string& interior) {
    auto key = std::make_pair(source, interior);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::optional<fs::path> interior_path;
    if (!interior.empty()) interior_path = base / interior;
    auto mesh = std::make_shared<const SimplicialComplex>(read_complex(base / source, dim, interior_path));
    cache.emplace(key, mesh);
    return mesh;
  };

  std::vector<ObservedGerm> observed;
  std::vector<ReferenceGerm> reference;
  const json& objects = field(doc, "objects", where);
  if (!objects.is_array()) throw ParseError(where + ": 'objects' must be an array");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const json& o = objects[i];
    const std::string at = where + ": objects[" + std::to_string(i) + "]";
    if (!o.is_object()) throw ParseError(at + ": expected an object");
    const std::string id = field(o, "id", at).get<std::string>();
    const std::string obj_at = at + " ('" + id + "')";
    const std::string role = field(o, "role", obj_at).get<std::string>();
    Vec3 translation;
    if (o.contains("translation")) translation = to_vec(o["translation"], dim, obj_at + ".translation");
    const json& source = field(o, "source", obj_at);
    if (role == "observed") {
      if (!source.is_string()) throw ParseError(obj_at + ": observed objects need a mesh path as source");
      std::string interior = o.contains("interior") ? o["interior"].get<std::string>() : "";
      observed.push_back({id, translation, load_mesh(source.get<std::string>(), interior)});
    } else if (role == "reference") {
      ReferenceFill fill = ReferenceFill::kSolid;
      if (o.contains("fill")) {
        auto f = o["fill"].get<std::string>();
        if (f == "surface") {
          fill = ReferenceFill::kSurface;
        } else if (f != "solid") {
          throw ParseError(obj_at + ": fill must be 'solid' or 'surface'");
        }
      }
      if (source.is_string()) {
        std::string interior = o.contains("interior") ? o["interior"].get<std::string>() : "";
        reference.push_back({id, translation, load_mesh(source.get<std::string>(), interior), fill});
      } else if (source.is_object()) {
        const std::string kind = field(source, "primitive", obj_at).get<std::string>();
        try {
          if (kind == "plane") {
            auto prim = AnalyticPrimitive::plane(dim, to_vec(field(source, "normal", obj_at), dim, obj_at + ".normal"),
                                                 field(source, "offset", obj_at).get<double>());
            reference.push_back({id, translation, prim, fill});
          } else if (kind == "sphere") {
            Vec3 center;
            if (source.contains("center")) center = to_vec(source["center"], dim, obj_at + ".center");
            auto prim = AnalyticPrimitive::sphere(dim, center, field(source, "radius", obj_at).get<double>());
            reference.push_back({id, translation, prim, fill});
          } else {
            throw ParseError(obj_at + ": unknown primitive '" + kind + "'");
          }
        } catch (const ValidationError& e) {
          throw ParseError(obj_at + ": " + e.what());
        }
      } else {
        throw ParseError(obj_at + ": source must be a mesh path or a primitive object");
      }
    } else {
      throw ParseError(obj_at + ": role must be 'observed' or 'reference'");
    }
  }

  GermGrainScene scene(dim, std::move(observed), std::move(reference), window, extended, seed);
  auto problems = check_scene(scene);
  if (!problems.empty()) {
    std::string message = where + ": scene is invalid:";
    for (const auto& p : problems) message += "\n  " + p;
    throw ValidationError(message);
  }
  return scene;
}

void write_scene(const GermGrainScene& scene, const fs::path& path) {
  const int dim = scene.dim();
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  const std::string stem = path.stem().string();
  std::map<const SimplicialComplex*, std::pair<std::string, std::string>> files;
  auto mesh_files = [&](const SimplicialComplex& mesh) {
    auto it = files.find(&mesh);
    if (it != files.end()) return it->second;
    std::string name = stem + "_mesh" + std::to_string(files.size());
    std::ostringstream off;
    write_off(off, mesh);
    write_file_atomic(dir / (name + ".off"), off.str());
    std::string interior;
    if (mesh.has_interior()) {
      std::ostringstream tet;
      write_interior(tet, mesh);
      interior = name + ".simplices";
      write_file_atomic(dir / interior, tet.str());
    }
    return files[&mesh] = {name + ".off", interior};
  };

  json doc;
  doc["dim"] = dim;
  if (scene.seed()) doc["seed"] = *scene.seed();
  doc["window"] = from_window(scene.window());
  doc["extended_window"] = from_window(scene.extended_window());
  json objects = json::array();
  for (const auto& g : scene.observed()) {
    auto [off, interior] = mesh_files(*g.shape);
    json o{{"id", g.id}, {"role", "observed"}, {"source", off}, {"translation", from_vec(g.location, dim)}};
    if (!interior.empty()) o["interior"] = interior;
    objects.push_back(o);
  }
  for (const auto& g : scene.reference()) {
    json o{{"id", g.id}, {"role", "reference"}, {"translation", from_vec(g.location, dim)}};
    o["fill"] = g.fill == ReferenceFill::kSolid ? "solid" : "surface";
    if (const auto* mesh = std::get_if<MeshPtr>(&g.shape)) {
      auto [off, interior] = mesh_files(**mesh);
      o["source"] = off;
      if (!interior.empty()) o["interior"] = interior;
    } else {
      const auto& prim = std::get<AnalyticPrimitive>(g.shape);
      if (const auto* plane = std::get_if<Plane>(&prim.shape())) {
        o["source"] = {{"primitive", "plane"}, {"normal", from_vec(plane->normal, dim)}, {"offset", plane->offset}};
      } else {
        const auto& s = std::get<Sphere>(prim.shape());
        o["source"] = {{"primitive", "sphere"}, {"center", from_vec(s.center, dim)}, {"radius", s.radius}};
      }
    }
    objects.push_back(o);
  }
  doc["objects"] = objects;
  write_file_atomic(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// CSV

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("CSV has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
  std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string& cell = rows[r][c];
    if (cell.empty()) {
      out.push_back(kMissing);
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cell.size()) throw ParseError("CSV row " + std::to_string(r + 2) + ", column '" + name + "': not a number");
    out.push_back(v);
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("CSV is empty");
  table.header = split_csv_line(line);
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != table.header.size()) {
      throw ParseError("CSV line " + std::to_string(number) + ": expected " + std::to_string(table.header.size()) +
                       " cells, found " + std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

CsvTable read_csv_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return read_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_measure_csv(std::ostream& out, const MeasureTable& t) {
  for (std::size_t c = 0; c < kMeasureColumns.size(); ++c) out << (c ? "," : "") << kMeasureColumns[c];
  out << '\n';
  for (std::size_t k = 0; k < t.radii.size(); ++k) {
    out << format_number(t.radii[k]);
    for (int s = 0; s < 4; ++s) out << ',' << (t.selected[s] ? format_number(t.mu[s][k]) : "");
    out << ',' << format_number(t.n[0][k]) << ',' << format_number(t.n[1][k]);
    for (int s = 0; s < 4; ++s) out << ',' << (t.selected[s] ? format_number(t.nu[s][k]) : "");
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SummaryCurve& curve) {
  for (std::size_t c = 0; c < kSummaryColumns.size(); ++c) out << (c ? "," : "") << kSummaryColumns[c];
  out << '\n';
  const std::string pair = curve.pair ? curve.pair->label() : "";
  for (std::size_t k = 0; k < curve.radii.size(); ++k) {
    out << format_number(curve.radii[k]) << ',' << format_number(curve.values[k]) << ',' << to_string(curve.kind)
        << ',' << pair << ',' << curve.intensities.n_ref << ',' << curve.intensities.n_obs << ','
        << format_number(curve.intensities.rho_x) << ',' << format_number(curve.intensities.rho_y) << ','
        << format_number(curve.intensities.window_volume) << '\n';
  }
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace rparallel::io
