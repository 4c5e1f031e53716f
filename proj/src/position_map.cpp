#include "mcd/position_map.hpp"

#include <cmath>
#include <sstream>

#include "mcd/error.hpp"

namespace mcd {

bool Domain::contains(const SchedulingPoint& p, double rel_tol) const {
    if (p.size() != box.size()) {
        return false;
    }
    for (std::size_t i = 0; i < box.size(); ++i) {
        const double tol = rel_tol * std::max(1.0, box[i][1] - box[i][0]);
        if (!(p[i] >= box[i][0] - tol && p[i] <= box[i][1] + tol)) {
            return false;
        }
    }
    return true;
}

void Domain::check(const SchedulingPoint& p) const {
    require(p.size() == box.size(), ErrorKind::kDomain,
            "scheduling point has " + std::to_string(p.size()) + " coordinates, domain has " +
                std::to_string(box.size()));
    if (!contains(p)) {
        for (std::size_t i = 0; i < box.size(); ++i) {
            if (p[i] < box[i][0] || p[i] > box[i][1]) {
                std::ostringstream os;
                os << "scheduling coordinate " << i << " = " << p[i] << " outside [" << box[i][0] << ", "
                   << box[i][1] << "]";
                fail(ErrorKind::kDomain, os.str());
            }
        }
    }
}

SchedulingPoint Domain::center() const {
    SchedulingPoint c(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
        c[i] = 0.5 * (box[i][0] + box[i][1]);
    }
    return c;
}

std::vector<SchedulingPoint> Domain::grid(std::size_t per_axis) const {
    require(per_axis >= 1, ErrorKind::kDomain, "grid needs at least one point per axis");
    std::vector<SchedulingPoint> out;
    if (box.empty()) {
        out.emplace_back();
        return out;
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < box.size(); ++i) {
        total *= per_axis;
    }
    out.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
        SchedulingPoint p(box.size());
        std::size_t rem = k;
        for (std::size_t i = 0; i < box.size(); ++i) {
            const std::size_t idx = rem % per_axis;
            rem /= per_axis;
            const double t = per_axis == 1 ? 0.5 : static_cast<double>(idx) / static_cast<double>(per_axis - 1);
            p[i] = box[i][0] + t * (box[i][1] - box[i][0]);
        }
        out.push_back(std::move(p));
    }
    return out;
}

PositionMap::PositionMap(Index rows, Index cols, Domain domain)
    : rows_(rows), cols_(cols), domain_(std::move(domain)) {}

PositionMap PositionMap::constant(const Matrix& m, Domain domain) {
    PositionMap pm(m.rows(), m.cols(), std::move(domain));
    pm.add_term(std::vector<int>(pm.domain_.dims(), 0), m);
    return pm;
}

void PositionMap::add_term(const std::vector<int>& exponents, const Matrix& coeff) {
    require(exponents.size() == domain_.dims(), ErrorKind::kDimension,
            "position map: exponent tuple length must equal the scheduling dimension");
    require(coeff.rows() == rows_ && coeff.cols() == cols_, ErrorKind::kDimension,
            "position map: coefficient shape mismatch");
    require(coeff.allFinite(), ErrorKind::kDomain, "position map: non-finite coefficient");
    for (int e : exponents) {
        require(e >= 0, ErrorKind::kDomain, "position map: negative exponent");
    }
    for (auto& t : terms_) {
        if (t.exponents == exponents) {
            t.coeff += coeff;
            return;
        }
    }
    terms_.push_back(Term{exponents, coeff});
}

Matrix PositionMap::evaluate(const SchedulingPoint& p) const {
    domain_.check(p);
    Matrix out = Matrix::Zero(rows_, cols_);
    for (const auto& t : terms_) {
        double w = 1.0;
        for (std::size_t i = 0; i < t.exponents.size(); ++i) {
            w *= std::pow(p[i], t.exponents[i]);
        }
        out += w * t.coeff;
    }
    return out;
}

PositionMap PositionMap::left_multiply(const Matrix& l) const {
    require(l.cols() == rows_, ErrorKind::kDimension, "position map: left factor has wrong column count");
    PositionMap out(l.rows(), cols_, domain_);
    for (const auto& t : terms_) {
        out.terms_.push_back(Term{t.exponents, l * t.coeff});
    }
    return out;
}

PositionMap PositionMap::right_multiply(const Matrix& r) const {
    require(r.rows() == cols_, ErrorKind::kDimension, "position map: right factor has wrong row count");
    PositionMap out(rows_, r.cols(), domain_);
    for (const auto& t : terms_) {
        out.terms_.push_back(Term{t.exponents, t.coeff * r});
    }
    return out;
}

PositionMap PositionMap::rows_block(Index first, Index count) const {
    PositionMap out(count, cols_, domain_);
    for (const auto& t : terms_) {
        out.terms_.push_back(Term{t.exponents, t.coeff.middleRows(first, count)});
    }
    return out;
}

PositionMap PositionMap::cols_block(Index first, Index count) const {
    PositionMap out(rows_, count, domain_);
    for (const auto& t : terms_) {
        out.terms_.push_back(Term{t.exponents, t.coeff.middleCols(first, count)});
    }
    return out;
}

PositionMap PositionMap::vstack(const std::vector<PositionMap>& parts, Index cols, const Domain& domain) {
    Index rows = 0;
    for (const auto& p : parts) {
        require(p.cols() == cols, ErrorKind::kDimension, "position map vstack: column mismatch");
        rows += p.rows();
    }
    PositionMap out(rows, cols, domain);
    Index offset = 0;
    for (const auto& p : parts) {
        for (const auto& t : p.terms_) {
            Matrix c = Matrix::Zero(rows, cols);
            c.middleRows(offset, p.rows()) = t.coeff;
            out.add_term(t.exponents, c);
        }
        offset += p.rows();
    }
    return out;
}

PositionMap PositionMap::hstack(const std::vector<PositionMap>& parts, Index rows, const Domain& domain) {
    Index cols = 0;
    for (const auto& p : parts) {
        require(p.rows() == rows, ErrorKind::kDimension, "position map hstack: row mismatch");
        cols += p.cols();
    }
    PositionMap out(rows, cols, domain);
    Index offset = 0;
    for (const auto& p : parts) {
        for (const auto& t : p.terms_) {
            Matrix c = Matrix::Zero(rows, cols);
            c.middleCols(offset, p.cols()) = t.coeff;
            out.add_term(t.exponents, c);
        }
        offset += p.cols();
    }
    return out;
}

int PositionMap::degree() const {
    int d = 0;
    for (const auto& t : terms_) {
        if (t.coeff.size() == 0 || t.coeff.cwiseAbs().maxCoeff() == 0.0) {
            continue;
        }
        int s = 0;
        for (int e : t.exponents) {
            s += e;
        }
        d = std::max(d, s);
    }
    return d;
}

bool PositionMap::is_constant() const {
    return degree() == 0;
}

}  // namespace mcd
