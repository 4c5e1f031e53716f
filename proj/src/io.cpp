#include "mcd/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "mcd/error.hpp"

namespace mcd {

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& what, Index rows_hint, Index cols_hint) {
    require(j.is_array(), ErrorKind::kConfig, what + ": expected a nested array");
    if (j.empty()) {
        return Matrix::Zero(rows_hint, cols_hint);
    }
    const auto rows = static_cast<Index>(j.size());
    require(j[0].is_array(), ErrorKind::kConfig, what + ": expected rows as arrays");
    const auto cols = static_cast<Index>(j[0].size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        require(row.is_array() && static_cast<Index>(row.size()) == cols, ErrorKind::kConfig,
                what + ": ragged rows");
        for (Index c = 0; c < cols; ++c) {
            require(row[static_cast<std::size_t>(c)].is_number(), ErrorKind::kConfig, what + ": non-numeric entry");
            m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

Json vector_to_json(const Vector& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) {
        a.push_back(v(i));
    }
    return a;
}

Vector vector_from_json(const Json& j, const std::string& what) {
    require(j.is_array(), ErrorKind::kConfig, what + ": expected an array");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        require(j[i].is_number(), ErrorKind::kConfig, what + ": non-numeric entry");
        v(static_cast<Index>(i)) = j[i].get<double>();
    }
    return v;
}

Json to_json(const StateSpace& g) {
    Json j;
    j["A"] = matrix_to_json(g.A);
    j["B"] = matrix_to_json(g.B);
    j["C"] = matrix_to_json(g.C);
    j["D"] = matrix_to_json(g.D);
    if (!g.input_labels.empty() || !g.output_labels.empty()) {
        j["labels"] = {{"inputs", g.input_labels}, {"outputs", g.output_labels}};
    }
    return j;
}

StateSpace state_space_from_json(const Json& j) {
    require(j.is_object(), ErrorKind::kConfig, "state space: expected an object");
    for (const char* key : {"A", "B", "C", "D"}) {
        require(j.contains(key), ErrorKind::kConfig, std::string("state space: missing \"") + key + "\"");
    }
    for (const auto& [key, value] : j.items()) {
        require(key == "A" || key == "B" || key == "C" || key == "D" || key == "labels", ErrorKind::kConfig,
                "state space: unknown key \"" + key + "\"");
    }
    const Matrix d = matrix_from_json(j["D"], "D");
    const Matrix a = matrix_from_json(j["A"], "A");
    const Index n = a.rows();
    StateSpace g;
    g.A = a;
    g.B = matrix_from_json(j["B"], "B", n, d.cols());
    g.C = matrix_from_json(j["C"], "C", d.rows(), n);
    g.D = j["D"].empty() ? Matrix::Zero(g.C.rows(), g.B.cols()) : d;
    if (j.contains("labels")) {
        const Json& l = j["labels"];
        if (l.contains("inputs")) {
            g.input_labels = l["inputs"].get<std::vector<std::string>>();
        }
        if (l.contains("outputs")) {
            g.output_labels = l["outputs"].get<std::vector<std::string>>();
        }
    }
    g.validate();
    return g;
}

void write_csv(std::ostream& os, const FrequencyResponse& fr) {
    os << "freq_hz,out,in,re,im,mag_db,phase_deg\n";
    os << std::setprecision(12);
    for (std::size_t k = 0; k < fr.freqs_hz.size(); ++k) {
        const CMatrix& v = fr.values[k];
        for (Index i = 0; i < v.rows(); ++i) {
            for (Index j = 0; j < v.cols(); ++j) {
                const Complex z = v(i, j);
                const double mag = std::abs(z);
                os << fr.freqs_hz[k] << ',' << i << ',' << j << ',' << z.real() << ',' << z.imag() << ','
                   << (mag > 0.0 ? 20.0 * std::log10(mag) : -400.0) << ',' << std::arg(z) * 180.0 / M_PI << '\n';
            }
        }
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::kConfig, "cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        fail(ErrorKind::kConfig, path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    require(out.good(), ErrorKind::kConfig, "cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace mcd
