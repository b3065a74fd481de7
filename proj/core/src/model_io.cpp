#include "efda/model_io.hpp"

#include <filesystem>
#include <fstream>

namespace efda {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("model json: malformed matrix");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols)
            throw std::invalid_argument("model json: ragged matrix");
        for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
    return v;
}

nlohmann::json grid_to_json(const Grid& g) {
    return {{"t0", g.t0}, {"t1", g.t1}, {"n", g.n}};
}

Grid grid_from_json(const nlohmann::json& j) {
    return Grid(j.at("t0").get<double>(), j.at("t1").get<double>(), j.at("n").get<int>());
}

} // namespace

nlohmann::json to_json(const VerticalFpca& basis) {
    return {
        {"grid", grid_to_json(basis.grid)},
        {"mean", vector_to_json(basis.mu_h)},
        {"directions", matrix_to_json(basis.directions)},
        {"singular_values", vector_to_json(basis.singular_values)},
        {"energy_fraction", vector_to_json(basis.energy_fraction)},
        {"coefficients", matrix_to_json(basis.coefficients)},
        {"total_energy", basis.total_energy},
    };
}

VerticalFpca vertical_from_json(const nlohmann::json& j) {
    VerticalFpca b;
    b.grid = grid_from_json(j.at("grid"));
    b.mu_h = vector_from_json(j.at("mean"));
    b.directions = matrix_from_json(j.at("directions"));
    b.singular_values = vector_from_json(j.at("singular_values"));
    b.energy_fraction = vector_from_json(j.at("energy_fraction"));
    b.coefficients = matrix_from_json(j.at("coefficients"));
    b.total_energy = j.at("total_energy").get<double>();
    return b;
}

nlohmann::json to_json(const HorizontalFpca& basis) {
    const Grid& g = basis.mu_psi.grid;
    return {
        {"grid", grid_to_json(g)},
        {"mu_psi", basis.mu_psi.values},
        {"mean_warp", basis.mean_warp.values},
        {"directions", matrix_to_json(basis.directions)},
        {"singular_values", vector_to_json(basis.singular_values)},
        {"energy_fraction", vector_to_json(basis.energy_fraction)},
        {"coefficients", matrix_to_json(basis.coefficients)},
        {"total_energy", basis.total_energy},
        {"karcher_converged", basis.karcher_converged},
    };
}

HorizontalFpca horizontal_from_json(const nlohmann::json& j) {
    HorizontalFpca b;
    const Grid g = grid_from_json(j.at("grid"));
    b.mu_psi = Psi(g, j.at("mu_psi").get<std::vector<double>>());
    b.mean_warp = Warp(g, j.at("mean_warp").get<std::vector<double>>());
    b.directions = matrix_from_json(j.at("directions"));
    b.singular_values = vector_from_json(j.at("singular_values"));
    b.energy_fraction = vector_from_json(j.at("energy_fraction"));
    b.coefficients = matrix_from_json(j.at("coefficients"));
    b.total_energy = j.at("total_energy").get<double>();
    b.karcher_converged = j.at("karcher_converged").get<bool>();
    return b;
}

nlohmann::json to_json(const GaussianModel& model) {
    return {
        {"format_version", 1},
        {"family", "gaussian"},
        {"mode", model.mode == GaussianMode::diagonal_blocks ? "diagonal-blocks" : "full-joint"},
        {"k1", model.k1},
        {"k2", model.k2},
        {"mean", vector_to_json(model.density.mean)},
        {"covariance", matrix_to_json(model.density.covariance)},
        {"vertical", to_json(model.vertical)},
        {"horizontal", to_json(model.horizontal)},
    };
}

nlohmann::json to_json(const KdeModel& model) {
    return {
        {"format_version", 1},
        {"family", "kde"},
        {"k1", model.k1},
        {"k2", model.k2},
        {"samples", model.density.samples},
        {"bandwidths", model.density.bandwidths},
        {"degenerate_coordinates", model.density.degenerate_coordinates},
        {"vertical", to_json(model.vertical)},
        {"horizontal", to_json(model.horizontal)},
    };
}

GenerativeModel model_from_json(const nlohmann::json& j) {
    if (j.at("format_version").get<int>() != 1)
        throw std::invalid_argument("model json: unsupported format_version");
    const std::string family = j.at("family").get<std::string>();
    if (family == "gaussian") {
        GaussianModel m;
        m.mode = j.at("mode").get<std::string>() == "diagonal-blocks"
                     ? GaussianMode::diagonal_blocks
                     : GaussianMode::full_joint;
        m.k1 = j.at("k1").get<int>();
        m.k2 = j.at("k2").get<int>();
        m.density.mean = vector_from_json(j.at("mean"));
        m.density.covariance = matrix_from_json(j.at("covariance"));
        m.vertical = vertical_from_json(j.at("vertical"));
        m.horizontal = horizontal_from_json(j.at("horizontal"));
        return m;
    }
    if (family == "kde") {
        KdeModel m;
        m.k1 = j.at("k1").get<int>();
        m.k2 = j.at("k2").get<int>();
        m.density.samples = j.at("samples").get<std::vector<std::vector<double>>>();
        m.density.bandwidths = j.at("bandwidths").get<std::vector<double>>();
        m.density.degenerate_coordinates = j.at("degenerate_coordinates").get<int>();
        m.vertical = vertical_from_json(j.at("vertical"));
        m.horizontal = horizontal_from_json(j.at("horizontal"));
        return m;
    }
    throw std::invalid_argument("model json: unknown family " + family);
}

void save_model(const std::string& path, const GenerativeModel& model) {
    const nlohmann::json j =
        std::holds_alternative<GaussianModel>(model)
            ? to_json(std::get<GaussianModel>(model))
            : to_json(std::get<KdeModel>(model));
    const std::filesystem::path target(path);
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("save_model: cannot open " + tmp.string());
        out << j.dump(2) << "\n";
        if (!out.flush()) throw std::runtime_error("save_model: write failed");
    }
    std::filesystem::rename(tmp, target);
}

GenerativeModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_model: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("load_model: invalid json: ") + e.what());
    }
    try {
        return model_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("load_model: invalid model document: ") + e.what());
    }
}

} // namespace efda
