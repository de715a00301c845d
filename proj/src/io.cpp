#include "qes/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qes/error.hpp"

namespace qes {

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidInput, "malformed JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write file '" + path + "'");
  out << text;
}

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::InvalidInput, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("bad field '") + key + "': " + e.what());
  }
}

RealMatrix real_rows(const Json& rows, Eigen::Index n, Eigen::Index p, const char* key) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
    throw Error(ErrorKind::InvalidInput, std::string("'") + key + "' must have one array per row");
  RealMatrix m(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& r = rows[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != p)
      throw Error(ErrorKind::InvalidInput, std::string("row ") + std::to_string(i) + " of '" + key + "' has wrong length");
    for (Eigen::Index k = 0; k < p; ++k) {
      if (!r[static_cast<std::size_t>(k)].is_number())
        throw Error(ErrorKind::InvalidInput, std::string("non-numeric entry in '") + key + "'");
      m(i, k) = r[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return m;
}

}  // namespace

ComplexMatrix matrix_from_json(const Json& j) {
  const auto n = field<Eigen::Index>(j, "rows");
  const auto p = field<Eigen::Index>(j, "cols");
  if (n < 1 || p < 1) throw Error(ErrorKind::InvalidInput, "matrix dimensions must be positive");
  const RealMatrix re = real_rows(j.at("real"), n, p, "real");
  RealMatrix im = RealMatrix::Zero(n, p);
  if (j.contains("imag")) im = real_rows(j.at("imag"), n, p, "imag");
  ComplexMatrix m(n, p);
  m.real() = re;
  m.imag() = im;
  if (!all_finite(m)) throw Error(ErrorKind::InvalidInput, "matrix has non-finite entries");
  return m;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json re = Json::array(), im = Json::array();
  bool complex = false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json rr = Json::array(), ri = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ri.push_back(m(i, k).imag());
      complex = complex || m(i, k).imag() != 0.0;
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  Json j = {{"rows", m.rows()}, {"cols", m.cols()}, {"real", re}};
  if (complex) j["imag"] = im;
  return j;
}

HermitianOperator load_operator(const std::string& path) {
  const Json j = load_json_file(path);
  try {
    return HermitianOperator(matrix_from_json(j));
  } catch (const Error& e) {
    throw Error(e.kind(), "in '" + path + "': " + e.what());
  }
}

PauliHamiltonian hamiltonian_from_json(const Json& j) {
  PauliHamiltonian h;
  h.num_qubits = field<int>(j, "num_qubits");
  const Json terms = field<Json>(j, "terms");
  if (!terms.is_array()) throw Error(ErrorKind::InvalidInput, "'terms' must be an array");
  for (const auto& t : terms) h.terms.push_back({field<std::string>(t, "pauli"), field<double>(t, "coeff")});
  h.validate();
  return h;
}

Json hamiltonian_to_json(const PauliHamiltonian& h) {
  Json terms = Json::array();
  for (const auto& t : h.terms) terms.push_back({{"pauli", t.pauli}, {"coeff", t.coeff}});
  return {{"num_qubits", h.num_qubits}, {"terms", terms}};
}

PauliHamiltonian load_hamiltonian(const std::string& path) {
  const Json j = load_json_file(path);
  try {
    return hamiltonian_from_json(j);
  } catch (const Error& e) {
    throw Error(e.kind(), "in '" + path + "': " + e.what());
  }
}

namespace {

AnsatzCircuit circuit_from_json(const Json& j) {
  AnsatzCircuit c;
  c.num_qubits = field<int>(j, "num_qubits");
  c.num_params = field<int>(j, "num_params");
  const Json gates = field<Json>(j, "gates");
  if (!gates.is_array()) throw Error(ErrorKind::InvalidInput, "'gates' must be an array");
  for (const auto& gj : gates) {
    Gate g;
    g.kind = parse_gate_kind(field<std::string>(gj, "kind"));
    if (gj.contains("qubits")) g.qubits = field<std::vector<int>>(gj, "qubits");
    if (gj.contains("pauli")) g.pauli = field<std::string>(gj, "pauli");
    if (gj.contains("param")) g.param = field<int>(gj, "param");
    if (gj.contains("scale")) g.scale = field<double>(gj, "scale");
    if (gj.contains("angle")) g.angle = field<double>(gj, "angle");
    c.gates.push_back(g);
  }
  c.validate();
  return c;
}

}  // namespace

std::vector<AnsatzCircuit> ansatz_from_json(const Json& j) {
  std::vector<AnsatzCircuit> out;
  if (j.is_object() && j.contains("circuits")) {
    for (const auto& c : j.at("circuits")) out.push_back(circuit_from_json(c));
    if (out.empty()) throw Error(ErrorKind::InvalidInput, "'circuits' is empty");
  } else {
    out.push_back(circuit_from_json(j));
  }
  return out;
}

std::vector<AnsatzCircuit> load_ansatz(const std::string& path) {
  const Json j = load_json_file(path);
  try {
    return ansatz_from_json(j);
  } catch (const Error& e) {
    throw Error(e.kind(), "in '" + path + "': " + e.what());
  }
}

std::vector<std::string> parse_initial_states(const std::string& arg) {
  std::vector<std::string> out;
  if (std::filesystem::exists(arg)) {
    const Json j = load_json_file(arg);
    if (!j.is_array()) throw Error(ErrorKind::InvalidInput, "initial-state file '" + arg + "' must hold a JSON list");
    for (const auto& s : j) {
      if (!s.is_string()) throw Error(ErrorKind::InvalidInput, "initial states must be bitstrings");
      out.push_back(s.get<std::string>());
    }
  } else {
    if (arg.find_first_not_of("01,") != std::string::npos)
      throw Error(ErrorKind::InvalidInput, "initial states '" + arg + "' are neither a file nor a bitstring list");
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidInput, "no initial states given");
  for (const auto& s : out) QuantumState::basis(s);
  return out;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vector_to_json(const RealVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_or_null(v(i)));
  return a;
}

}  // namespace qes
