#pragma once

// JSON wire formats and CSV output.
//
// Curvature tensor: { "n": int, "entries": [ {"i","j","k","l","v"}, ... ] }
//   listing any generating set; the reader completes each entry over its
//   symmetry orbit and validates the result. The writer emits canonical
//   representatives (i<j, k<l, (i,j) <= (k,l) lexicographically).
// Form operator: { "n", "p", "basis": [[..],..], "matrix": [[..],..] }.
// Simplicial complex: { "vertices": V, "maximal_simplices": [[..],..] }.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wzk/curvature.hpp"
#include "wzk/errors.hpp"
#include "wzk/hodge.hpp"
#include "wzk/stochastic.hpp"
#include "wzk/weitzenbock.hpp"

namespace wzk {

using ordered_json = nlohmann::ordered_json;

inline ordered_json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw input_error("invalid JSON in " + path + ": " + e.what());
    }
}

inline void save_json_file(const std::string& path, const ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline RiemannTensor<double> tensor_from_json(const ordered_json& j) {
    try {
        const int n = j.at("n").get<int>();
        if (n < 1 || n > 12) throw input_error("tensor dimension out of supported range 1..12");
        RiemannTensor<double> R(n);
        for (const auto& e : j.at("entries")) {
            const int i = e.at("i").get<int>(), jj = e.at("j").get<int>();
            const int k = e.at("k").get<int>(), l = e.at("l").get<int>();
            if (i < 1 || i > n || jj < 1 || jj > n || k < 1 || k > n || l < 1 || l > n)
                throw input_error("tensor entry index out of range");
            R.set_with_symmetries(i, jj, k, l, e.at("v").get<double>());
        }
        const auto rep = validate(R);
        if (!rep.passes())
            throw validation_error("tensor entries violate the curvature symmetries (antisymmetry defect " +
                                   std::to_string(rep.antisymmetry) + ", pair defect " + std::to_string(rep.pair) +
                                   ", first-Bianchi defect " + std::to_string(rep.bianchi) + ")");
        return R;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("malformed tensor JSON: ") + e.what());
    }
}

inline ordered_json tensor_to_json(const RiemannTensor<double>& R) {
    const int n = R.dim();
    ordered_json entries = ordered_json::array();
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int l = k + 1; l <= n; ++l) {
                    if (std::make_pair(i, j) > std::make_pair(k, l)) continue;
                    const double v = R(i, j, k, l);
                    if (v == 0.0) continue;
                    entries.push_back({{"i", i}, {"j", j}, {"k", k}, {"l", l}, {"v", v}});
                }
    return ordered_json{{"n", n}, {"entries", entries}};
}

inline ordered_json form_operator_to_json(const FormOperator<double>& op) {
    const WedgeBasis basis(op.n, op.p);
    ordered_json basis_json = ordered_json::array();
    for (int r = 0; r < basis.size(); ++r) basis_json.push_back(basis[r].indices);
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < op.matrix.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < op.matrix.cols(); ++c) row.push_back(op.matrix(r, c));
        rows.push_back(std::move(row));
    }
    return ordered_json{{"n", op.n}, {"p", op.p}, {"basis", basis_json}, {"matrix", rows}};
}

inline SimplicialComplex complex_from_json(const ordered_json& j) {
    try {
        const int V = j.at("vertices").get<int>();
        std::vector<std::vector<int>> maximal;
        for (const auto& s : j.at("maximal_simplices")) maximal.push_back(s.get<std::vector<int>>());
        return SimplicialComplex::from_maximal(V, maximal);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("malformed complex JSON: ") + e.what());
    } catch (const domain_error& e) {
        throw input_error(std::string("invalid complex: ") + e.what());
    }
}

inline ModelManifold model_from_json(const ordered_json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "torus") return ModelManifold::torus(j.at("n").get<int>(), j.at("L").get<double>());
        if (kind == "sphere") return ModelManifold::sphere(j.at("n").get<int>());
        if (kind == "product") {
            std::vector<ModelManifold> parts;
            for (const auto& f : j.at("factors")) parts.push_back(model_from_json(f));
            return ModelManifold::product(parts);
        }
        throw input_error("unknown model kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("malformed model JSON: ") + e.what());
    } catch (const domain_error& e) {
        throw input_error(std::string("invalid model: ") + e.what());
    }
}

inline ordered_json model_to_json(const ModelManifold& m) {
    const auto factor_json = [](const ModelManifold::Factor& f) {
        if (f.kind == ModelManifold::Factor::Kind::torus)
            return ordered_json{{"kind", "torus"}, {"n", f.dim}, {"L", f.side}};
        return ordered_json{{"kind", "sphere"}, {"n", f.dim}};
    };
    if (m.factors.size() == 1) return factor_json(m.factors[0]);
    ordered_json factors = ordered_json::array();
    for (const auto& f : m.factors) factors.push_back(factor_json(f));
    return ordered_json{{"kind", "product"}, {"factors", factors}};
}

// { "type": "constant", "value": c }  or
// { "type": "affine", "offset": c, "coeffs": [..] } over ambient coordinates.
inline ScalarField field_from_json(const ordered_json& j, const ModelManifold& model) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "constant") return constant_field(j.at("value").get<double>());
        if (type == "affine") {
            const auto c = j.at("coeffs").get<std::vector<double>>();
            if (static_cast<int>(c.size()) != model.coord_size())
                throw input_error("affine field: coeffs length must equal the model coordinate size");
            Eigen::VectorXd coeffs(c.size());
            for (std::size_t t = 0; t < c.size(); ++t) coeffs[static_cast<Eigen::Index>(t)] = c[t];
            return affine_field(j.at("offset").get<double>(), coeffs);
        }
        throw input_error("unknown field type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("malformed field JSON: ") + e.what());
    }
}

inline void write_decay_csv(const std::string& path, const DecayCurve& curve) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw input_error("cannot write " + path);
    std::fputs("t,mean,stderr\n", f);
    for (Eigen::Index s = 0; s < curve.times.size(); ++s)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", curve.times[s], curve.mean[s], curve.se[s]);
    std::fclose(f);
}

}  // namespace wzk
