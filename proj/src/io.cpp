#include "torsion/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

namespace torsion {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

const Json& member(const Json& j, const std::string& where,
                   const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

int as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

double as_real(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

bool as_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected a boolean");
  return j.get<bool>();
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

Scalar as_scalar(const Json& j, const std::string& where) {
  if (j.is_number()) return Scalar(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Scalar(j[0].get<double>(), j[1].get<double>());
  fail(where, "expected a number or an [re, im] pair");
}

Matrix as_matrix(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a matrix (array of rows)");
  const int rows = static_cast<int>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) fail(where, "expected a matrix (array of rows)");
  const int cols = static_cast<int>(j[0].size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      fail(where, "row " + std::to_string(i) + " has the wrong length");
    for (int c = 0; c < cols; ++c)
      m(i, c) = as_scalar(row[c], where + "[" + std::to_string(i) + "][" +
                                      std::to_string(c) + "]");
  }
  return m;
}

GramMetric as_gram(const Json& j, const std::string& where, int rank) {
  const Matrix m = as_matrix(j, where);
  if (m.rows() != rank || m.cols() != rank)
    fail(where, "expected a " + std::to_string(rank) + "x" +
                    std::to_string(rank) + " matrix");
  try {
    return GramMetric(m);
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
}

FixedPointDatum parse_fixed(const Json& j, const std::string& where,
                            int rank) {
  FixedPointDatum x;
  x.id = as_string(member(j, where, "id"), where + ".id");
  x.index = as_int(member(j, where, "index"), where + ".index");
  if (x.index < 0) fail(where + ".index", "index must be non-negative");
  x.gram = as_gram(member(j, where, "gram"), where + ".gram", rank);
  return x;
}

ClosedOrbitDatum parse_orbit(const Json& j, const std::string& where,
                             int rank) {
  ClosedOrbitDatum o;
  o.id = as_string(member(j, where, "id"), where + ".id");
  o.index = as_int(member(j, where, "index"), where + ".index");
  if (o.index < 0) fail(where + ".index", "index must be non-negative");
  o.period = as_real(member(j, where, "period"), where + ".period");
  if (!(o.period > 0)) fail(where + ".period", "period must be positive");
  o.twist = as_int(member(j, where, "twist"), where + ".twist");
  if (o.twist != 1 && o.twist != -1)
    fail(where + ".twist", "twist must be +1 or -1");
  o.holonomy = as_matrix(member(j, where, "holonomy"), where + ".holonomy");
  if (o.holonomy.rows() != rank || o.holonomy.cols() != rank)
    fail(where + ".holonomy", "expected a " + std::to_string(rank) + "x" +
                                  std::to_string(rank) + " matrix");
  if (const auto it = j.find("reverse_orientation"); it != j.end())
    o.reverse_orientation = as_bool(*it, where + ".reverse_orientation");
  return o;
}

FilteredComplex parse_chain_model(const Json& j, const std::string& where) {
  const Json& jd = member(j, where, "dims");
  if (!jd.is_array()) fail(where + ".dims", "expected an array of integers");
  std::vector<int> dims;
  for (std::size_t k = 0; k < jd.size(); ++k) {
    dims.push_back(as_int(jd[k], where + ".dims[" + std::to_string(k) + "]"));
    if (dims.back() < 0) fail(where + ".dims", "dimensions must be >= 0");
  }
  const Json& jdiff = member(j, where, "differentials");
  if (!jdiff.is_array())
    fail(where + ".differentials", "expected an array of matrices");
  if (jdiff.size() + 1 != dims.size() && !(dims.size() <= 1 && jdiff.empty()))
    fail(where + ".differentials",
         "expected one differential per adjacent degree pair");
  std::vector<Matrix> diffs;
  for (std::size_t k = 0; k < jdiff.size(); ++k) {
    const std::string mw =
        where + ".differentials[" + std::to_string(k) + "]";
    Matrix d = as_matrix(jdiff[k], mw);
    if (d.size() == 0) d = Matrix::Zero(dims[k + 1], dims[k]);
    if (d.rows() != dims[k + 1] || d.cols() != dims[k])
      fail(mw, "expected shape " + std::to_string(dims[k + 1]) + "x" +
                   std::to_string(dims[k]));
    diffs.push_back(std::move(d));
  }
  const Json& jl = member(j, where, "levels");
  if (!jl.is_array() || jl.size() != dims.size())
    fail(where + ".levels", "expected one level list per degree");
  std::vector<std::vector<int>> levels(dims.size());
  for (std::size_t k = 0; k < jl.size(); ++k) {
    const std::string lw = where + ".levels[" + std::to_string(k) + "]";
    if (!jl[k].is_array() || static_cast<int>(jl[k].size()) != dims[k])
      fail(lw, "expected " + std::to_string(dims[k]) + " entries");
    for (const Json& e : jl[k]) levels[k].push_back(as_int(e, lw));
  }
  try {
    return FilteredComplex(CochainComplex(std::move(dims), std::move(diffs)),
                           std::move(levels));
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
}

SurgeryMap parse_surgery(const Json& j, const std::string& where, int rank,
                         const std::vector<CriticalElement>& elements) {
  if (!j.is_object()) fail(where, "expected an object keyed by orbit id");
  SurgeryMap out;
  for (const auto& [id, entry] : j.items()) {
    const std::string ew = where + "." + id;
    const ClosedOrbitDatum* orbit = nullptr;
    for (const auto& e : elements)
      if (const auto* o = std::get_if<ClosedOrbitDatum>(&e); o && o->id == id)
        orbit = o;
    if (!orbit) fail(ew, "no closed orbit with this id");
    SurgeryDatum s;
    s.tau_prime = as_matrix(member(entry, ew, "tau"), ew + ".tau");
    if (s.tau_prime.rows() != rank || s.tau_prime.cols() != rank)
      fail(ew + ".tau", "expected a " + std::to_string(rank) + "x" +
                            std::to_string(rank) + " matrix");
    s.n_a = as_int(member(entry, ew, "n_a"), ew + ".n_a");
    s.n_a_prime = as_int(member(entry, ew, "n_a_prime"), ew + ".n_a_prime");
    if ((s.n_a != 1 && s.n_a != -1) || (s.n_a_prime != 1 && s.n_a_prime != -1))
      fail(ew, "attaching signs must be +1 or -1");
    if (s.n_a * s.n_a_prime != -orbit->twist)
      fail(ew, "sign constraint n(a) * n(a') = -twist violated (got " +
                   std::to_string(s.n_a) + " * " + std::to_string(s.n_a_prime) +
                   " with twist " + std::to_string(orbit->twist) + ")");
    s.gram_x = as_gram(member(entry, ew, "gram_x"), ew + ".gram_x", rank);
    s.gram_x_prime =
        as_gram(member(entry, ew, "gram_x_prime"), ew + ".gram_x_prime", rank);
    out.emplace(id, std::move(s));
  }
  return out;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

SystemFile parse_system_text(const std::string& text, double tol) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw InputError(std::string("system file: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("system file", "top level must be an object");
  const int rank = as_int(member(j, "system file", "rank"), "rank");
  if (rank < 1) fail("rank", "rank must be >= 1");

  const Json& je = member(j, "system file", "elements");
  if (!je.is_array() || je.empty())
    fail("elements", "expected a non-empty array");
  std::vector<CriticalElement> elements;
  for (std::size_t i = 0; i < je.size(); ++i) {
    const std::string ew = "elements[" + std::to_string(i) + "]";
    const Json& e = je[i];
    if (!e.is_object()) fail(ew, "expected an object");
    const std::string kind = as_string(member(e, ew, "kind"), ew + ".kind");
    if (kind == "fixed")
      elements.emplace_back(parse_fixed(e, ew, rank));
    else if (kind == "orbit")
      elements.emplace_back(parse_orbit(e, ew, rank));
    else
      fail(ew + ".kind", "expected \"fixed\" or \"orbit\"");
  }

  bool split = false;
  if (const auto it = j.find("split"); it != j.end())
    split = as_bool(*it, "split");

  std::optional<FilteredComplex> model;
  if (const auto it = j.find("chain_model"); it != j.end())
    model = parse_chain_model(*it, "chain_model");

  SurgeryMap surgery;
  if (const auto it = j.find("surgery"); it != j.end())
    surgery = parse_surgery(*it, "surgery", rank, elements);

  try {
    return SystemFile{MorseSmaleSystem(rank, std::move(elements),
                                       std::move(model), split, tol),
                      std::move(surgery)};
  } catch (const std::exception& e) {
    throw InputError(std::string("system file: ") + e.what());
  }
}

SystemFile load_system_file(const std::string& path, double tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open system file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_system_text(buf.str(), tol);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

MorseSmaleSystem parse_system(const std::string& path, double tol) {
  return std::move(load_system_file(path, tol).system);
}

std::string serialize_system(const SystemFile& file) {
  const MorseSmaleSystem& sys = file.system;
  Json j;
  j["rank"] = sys.rank();
  j["split"] = sys.split();
  Json elems = Json::array();
  for (const auto& e : sys.elements()) {
    Json je;
    if (const auto* x = std::get_if<FixedPointDatum>(&e)) {
      je["kind"] = "fixed";
      je["id"] = x->id;
      je["index"] = x->index;
      je["gram"] = matrix_json(x->gram.gram());
    } else {
      const auto& o = std::get<ClosedOrbitDatum>(e);
      je["kind"] = "orbit";
      je["id"] = o.id;
      je["index"] = o.index;
      je["period"] = o.period;
      je["twist"] = o.twist;
      je["holonomy"] = matrix_json(o.holonomy);
      je["reverse_orientation"] = o.reverse_orientation;
    }
    elems.push_back(std::move(je));
  }
  j["elements"] = std::move(elems);
  if (sys.chain_model()) {
    const FilteredComplex& f = *sys.chain_model();
    const CochainComplex& c = f.complex();
    Json jm;
    jm["dims"] = c.dims();
    Json diffs = Json::array();
    for (int k = 0; k + 1 < c.degrees(); ++k) diffs.push_back(matrix_json(c.diff(k)));
    jm["differentials"] = std::move(diffs);
    Json levels = Json::array();
    for (int k = 0; k < c.degrees(); ++k) {
      Json lv = Json::array();
      for (int i = 0; i < c.dim(k); ++i) lv.push_back(f.level(k, i));
      levels.push_back(std::move(lv));
    }
    jm["levels"] = std::move(levels);
    j["chain_model"] = std::move(jm);
  }
  if (!file.surgery.empty()) {
    Json js;
    for (const auto& [id, s] : file.surgery) {
      Json entry;
      entry["tau"] = matrix_json(s.tau_prime);
      entry["n_a"] = s.n_a;
      entry["n_a_prime"] = s.n_a_prime;
      entry["gram_x"] = matrix_json(s.gram_x.gram());
      entry["gram_x_prime"] = matrix_json(s.gram_x_prime.gram());
      js[id] = std::move(entry);
    }
    j["surgery"] = std::move(js);
  }
  return j.dump(2) + "\n";
}

std::string format_float(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x00000100000001b3ull;
  }
  return h;
}

std::string digest_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void RunReport::add(const std::string& key, std::string value) {
  fields.emplace_back(key, std::move(value));
}

void RunReport::add(const std::string& key, double value) {
  add(key, format_float(value));
}

void RunReport::add(const std::string& key, int value) {
  add(key, std::to_string(value));
}

std::string RunReport::to_json() const {
  Json j;
  j["command"] = command;
  j["input_digest"] = input_digest;
  j["tol"] = format_float(tol);
  j["pass"] = pass;
  Json jf;
  for (const auto& [k, v] : fields) jf[k] = v;
  j["fields"] = std::move(jf);
  return j.dump(2) + "\n";
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string out = "\"";
  for (char c : raw) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string RunReport::to_csv() const {
  std::string out = "key,value\r\n";
  const auto row = [&out](const std::string& k, const std::string& v) {
    out += csv_field(k) + "," + csv_field(v) + "\r\n";
  };
  row("command", command);
  row("input_digest", input_digest);
  row("tol", format_float(tol));
  row("pass", pass ? "true" : "false");
  for (const auto& [k, v] : fields) row(k, v);
  return out;
}

}  // namespace torsion
