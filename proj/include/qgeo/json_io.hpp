// JSON exchange formats: matrices as {"rows", "cols", "re", "im"} with
// row-major entry arrays, states with an extra "rank_tol" field, generators
// as {"H", "Gamma"}, geodesic plans with endpoints, theta, M and R_scale.

#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "qgeo/geodesic.hpp"
#include "qgeo/state.hpp"

namespace qgeo {

using Json = nlohmann::json;

inline Json matrix_to_json(const Matrix& m) {
    Json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j;
}

namespace detail {

inline void reject_unknown_fields(const Json& j, std::initializer_list<const char*> allowed,
                                  const std::string& path) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* name : allowed)
            if (item.key() == name) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError(path.empty() ? item.key() : path + "." + item.key(),
                              "unknown field");
    }
}

inline double number_at(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "value is not finite");
    return x;
}

}  // namespace detail

inline Matrix matrix_from_json(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected a matrix object");
    detail::reject_unknown_fields(j, {"rows", "cols", "re", "im", "rank_tol"}, path);
    for (const char* key : {"rows", "cols", "re", "im"})
        if (!j.contains(key)) throw ConfigError(path + "." + key, "missing field");
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
        throw ConfigError(path + ".rows", "rows/cols must be integers");
    const long rows = j["rows"].get<long>();
    const long cols = j["cols"].get<long>();
    if (rows <= 0 || cols <= 0) throw ConfigError(path + ".rows", "dimensions must be positive");
    const auto& re = j["re"];
    const auto& im = j["im"];
    if (!re.is_array() || static_cast<long>(re.size()) != rows * cols)
        throw ConfigError(path + ".re", "expected a row-major array of rows*cols numbers");
    if (!im.is_array() || static_cast<long>(im.size()) != rows * cols)
        throw ConfigError(path + ".im", "expected a row-major array of rows*cols numbers");
    Matrix m(rows, cols);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) {
            const long idx = r * cols + c;
            m(r, c) = Complex(detail::number_at(re[idx], path + ".re"),
                              detail::number_at(im[idx], path + ".im"));
        }
    return m;
}

inline Json state_to_json(const DensityOperator& rho) {
    Json j = matrix_to_json(rho.matrix());
    j["rank_tol"] = rho.rank_tol();
    return j;
}

inline DensityOperator state_from_json(const Json& j, const std::string& path,
                                       double default_rank_tol = kDefaultRankTol) {
    const Matrix m = matrix_from_json(j, path);
    double rank_tol = default_rank_tol;
    if (j.contains("rank_tol")) rank_tol = detail::number_at(j["rank_tol"], path + ".rank_tol");
    try {
        return DensityOperator(m, rank_tol);
    } catch (const NumericsError& err) {
        throw ConfigError(path, err.what());
    }
}

inline Json tangent_to_json(const TangentVector& v) {
    Json j = matrix_to_json(v.matrix());
    j["rank_tol"] = v.base().rank_tol();
    return j;
}

inline Json generator_to_json(const NonHermitianGenerator& gen) {
    Json j;
    j["H"] = matrix_to_json(gen.H());
    j["Gamma"] = matrix_to_json(gen.Gamma());
    return j;
}

inline NonHermitianGenerator generator_from_json(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object with H and Gamma");
    detail::reject_unknown_fields(j, {"H", "Gamma"}, path);
    for (const char* key : {"H", "Gamma"})
        if (!j.contains(key)) throw ConfigError(path + "." + key, "missing field");
    const Matrix h = matrix_from_json(j["H"], path + ".H");
    const Matrix gamma = matrix_from_json(j["Gamma"], path + ".Gamma");
    if (hermiticity_defect(h) > kHermitianTol)
        throw ConfigError(path + ".H", "operator not Hermitian within 1e-10");
    if (hermiticity_defect(gamma) > kHermitianTol)
        throw ConfigError(path + ".Gamma", "operator not Hermitian within 1e-10");
    return NonHermitianGenerator(h, gamma);
}

inline Json plan_to_json(const GeodesicPlan& plan) {
    Json j;
    j["W1"] = matrix_to_json(plan.W1.matrix());
    j["W2"] = matrix_to_json(plan.W2.matrix());
    j["theta"] = plan.theta;
    j["M"] = matrix_to_json(plan.M);
    j["R_scale"] = plan.R_scale;
    return j;
}

}  // namespace qgeo
