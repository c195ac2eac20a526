#ifndef QDM_IO_HPP
#define QDM_IO_HPP

// JSON exchange formats. Matrices are {"dims":[...], "re":[[...]], "im":[[...]]}
// with row-major real and imaginary parts; "im" may be omitted for real input.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qdm/correlations.hpp"
#include "qdm/core.hpp"
#include "qdm/measurement.hpp"
#include "qdm/measures.hpp"
#include "qdm/merging.hpp"
#include "qdm/states.hpp"

namespace qdm::io {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "1";

struct MatrixWithDims {
  Matrix data;
  Dims dims;
};

inline json matrix_to_json(const Matrix& m, const Dims& dims) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array();
    json ri = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      // +0.0 collapses negative zeros so equal matrices serialize identically.
      rr.push_back(m(i, j).real() + 0.0);
      ri.push_back(m(i, j).imag() + 0.0);
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return json{{"dims", dims}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline json to_json(const DensityMatrix& rho) { return matrix_to_json(rho.data(), rho.dims()); }

inline MatrixWithDims matrix_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("re")) throw Error(ErrorKind::ParseError, "matrix object needs \"re\"");
    const auto& re = j.at("re");
    if (!re.is_array() || re.empty()) throw Error(ErrorKind::ParseError, "\"re\" must be a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(re.size());
    const auto cols = static_cast<Eigen::Index>(re.at(0).size());
    Matrix m = Matrix::Zero(rows, cols);
    const bool has_im = j.contains("im");
    const json& im = has_im ? j.at("im") : re;
    if (has_im && im.size() != re.size()) throw Error(ErrorKind::ParseError, "\"re\" and \"im\" row counts differ");
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto& row = re.at(static_cast<std::size_t>(r));
      if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorKind::ParseError, "ragged \"re\" rows");
      const auto& irow = im.at(static_cast<std::size_t>(r));
      if (has_im && static_cast<Eigen::Index>(irow.size()) != cols)
        throw Error(ErrorKind::ParseError, "ragged \"im\" rows");
      for (Eigen::Index c = 0; c < cols; ++c) {
        const double x = row.at(static_cast<std::size_t>(c)).get<double>();
        const double y = has_im ? irow.at(static_cast<std::size_t>(c)).get<double>() : 0.0;
        m(r, c) = cplx(x, y);
      }
    }
    Dims dims = j.contains("dims") ? j.at("dims").get<Dims>() : Dims{static_cast<int>(rows)};
    return {std::move(m), std::move(dims)};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

inline DensityMatrix density_from_json(const json& j) {
  auto [m, dims] = matrix_from_json(j);
  return DensityMatrix::validate(std::move(m), std::move(dims));
}

// ---------------------------------------------------------------------------

inline json to_json(const Measurement& m) {
  json j;
  j["kind"] = m.kind() == MeasurementKind::ProjectiveRank1 ? "projective" : "povm";
  if (!m.params().empty()) j["params"] = m.params();
  json elems = json::array();
  for (const auto& e : m.elements()) elems.push_back(matrix_to_json(e, {m.dim()}));
  j["elements"] = std::move(elems);
  return j;
}

inline Measurement measurement_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    MeasurementKind k;
    if (kind == "projective")
      k = MeasurementKind::ProjectiveRank1;
    else if (kind == "povm")
      k = MeasurementKind::POVM;
    else
      throw Error(ErrorKind::ParseError, "measurement kind must be \"projective\" or \"povm\"");
    std::vector<double> params = j.contains("params") ? j.at("params").get<std::vector<double>>() : std::vector<double>{};
    if (!j.contains("elements")) {
      if (k == MeasurementKind::ProjectiveRank1 && params.size() == 2) return projective_qubit(params[0], params[1]);
      throw Error(ErrorKind::ParseError, "measurement needs \"elements\" (or qubit \"params\":[theta,phi])");
    }
    std::vector<Matrix> elems;
    for (const auto& e : j.at("elements")) elems.push_back(matrix_from_json(e).data);
    return Measurement::validate(std::move(elems), k, std::move(params));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

// ---------------------------------------------------------------------------

inline json to_json(const StateSpec& spec) {
  json j;
  j["family"] = std::string(to_string(spec.family()));
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        json p = json::object();
        if constexpr (std::is_same_v<T, family::Bell>) {
          p["index"] = f.index;
        } else if constexpr (std::is_same_v<T, family::BellDiagonal>) {
          p["p"] = f.p;
        } else if constexpr (std::is_same_v<T, family::Werner>) {
          p["p"] = f.p;
        } else if constexpr (std::is_same_v<T, family::Product>) {
          p["a"] = to_json(f.a);
          p["b"] = to_json(f.b);
        } else if constexpr (std::is_same_v<T, family::ClassicalQuantum>) {
          p["q"] = f.q;
          json c = json::array();
          for (const auto& s : f.conditionals) c.push_back(to_json(s));
          p["conditionals"] = std::move(c);
          p["basis"] = matrix_to_json(f.basis, {static_cast<int>(f.basis.rows())});
        } else if constexpr (std::is_same_v<T, family::RandomGinibre>) {
          p["dims"] = f.dims;
          p["rank"] = f.rank;
          j["seed"] = f.seed;
        } else if constexpr (std::is_same_v<T, family::RandomPure>) {
          p["dims"] = f.dims;
          j["seed"] = f.seed;
        } else {
          p["matrix"] = to_json(f.state);
        }
        j["params"] = std::move(p);
      },
      spec.params);
  return j;
}

inline StateSpec state_spec_from_json(const json& j) {
  try {
    const std::string fam = j.at("family").get<std::string>();
    const json p = j.contains("params") ? j.at("params") : json::object();
    const std::uint64_t seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;
    if (fam == "bell") return {family::Bell{p.value("index", 0)}};
    if (fam == "bell-diagonal") {
      family::BellDiagonal b;
      if (p.contains("p")) b.p = p.at("p").get<std::array<double, 4>>();
      return {b};
    }
    if (fam == "werner") return {family::Werner{p.value("p", 0.0)}};
    if (fam == "product") return {family::Product{density_from_json(p.at("a")), density_from_json(p.at("b"))}};
    if (fam == "classical-quantum") {
      family::ClassicalQuantum cq;
      cq.q = p.at("q").get<std::vector<double>>();
      for (const auto& c : p.at("conditionals")) cq.conditionals.push_back(density_from_json(c));
      cq.basis = matrix_from_json(p.at("basis")).data;
      return {std::move(cq)};
    }
    if (fam == "random-ginibre")
      return {family::RandomGinibre{p.value("dims", Dims{2, 2}), p.value("rank", 0), seed}};
    if (fam == "random-pure") return {family::RandomPure{p.value("dims", Dims{2, 2}), seed}};
    if (fam == "custom") return {family::Custom{density_from_json(p.at("matrix"))}};
    throw Error(ErrorKind::InvalidParams, "unknown family \"" + fam + "\"");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

// ---------------------------------------------------------------------------

inline json to_json(const DiscordResult& r, bool verbose) {
  json j;
  j["dims"] = r.dims;
  j["mutual_info"] = r.mutual_info.value;
  j["classical_corr"] = r.classical_corr.value;
  j["discord"] = r.discord.value;
  j["best_measurement"] = to_json(r.best_measurement);
  j["markup_check"] = r.markup_check;
  j["converged"] = r.converged;
  if (r.povm_classical_corr) {
    j["povm"] = json{{"classical_corr", r.povm_classical_corr->value},
                     {"discord", (r.mutual_info - *r.povm_classical_corr).value},
                     {"measurement", to_json(*r.povm_measurement)}};
  }
  if (verbose) {
    json t = json::array();
    for (const auto& p : r.optimizer_trace) t.push_back(json{{"params", p.params}, {"objective", p.objective}});
    j["optimizer_trace"] = std::move(t);
  }
  return j;
}

inline json to_json(const MergeLedger& l) {
  const auto& t = l.transcript;
  return json{{"cost_before", l.cost_before.value},
              {"cost_after", l.cost_after.value},
              {"markup", l.markup.value},
              {"ebits_distillable_before", l.ebits_distillable_before},
              {"transcript",
               {{"ancilla_dim", t.ancilla_dim},
                {"unitary_sha256", t.unitary_sha256},
                {"mutual_info_before", t.mutual_info_before.value},
                {"mutual_info_coherent", t.mutual_info_coherent.value},
                {"mutual_info_after", t.mutual_info_after.value},
                {"cond_entropy_coherent", t.cond_entropy_coherent.value}}}};
}

inline json to_json(const PurityReport& r) {
  return json{{"log_dim", r.log_dim},
              {"joint_entropy", r.joint_entropy.value},
              {"discord_used", r.discord_used.value},
              {"kappa", r.kappa},
              {"regularization_caveat", r.regularization_caveat},
              {"state_class", std::string(to_string(r.state_class))}};
}

/// True if every number in the document is finite.
inline bool all_finite(const json& j) {
  if (j.is_number_float()) return std::isfinite(j.get<double>());
  if (j.is_structured())
    for (const auto& v : j)
      if (!all_finite(v)) return false;
  return true;
}

}  // namespace qdm::io

#endif  // QDM_IO_HPP
