#include "katflow/jacobian.hpp"

#include <algorithm>
#include <ostream>

namespace katflow {

int JacobianMatrix::row_of(Edge e) const {
    const auto it = std::find(row_edges.begin(), row_edges.end(), e);
    return it == row_edges.end() ? -1 : static_cast<int>(it - row_edges.begin());
}

int JacobianMatrix::column_of(int id) const {
    const auto it = std::find(columns.begin(), columns.end(), id);
    return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

JacobianMatrix build_full(const Triangulation& g, const Packing& p) {
    if (g.vertex_count() != static_cast<int>(p.size())) {
        throw std::invalid_argument("build_full: graph has " + std::to_string(g.vertex_count()) +
                                    " vertices, packing has " + std::to_string(p.size()) + " disks");
    }
    return build_full(g.edges(), p);
}

JacobianMatrix build_full(const std::vector<Edge>& rows, const Packing& p) {
    const int n = static_cast<int>(p.size());
    JacobianMatrix j;
    j.row_edges = rows;
    j.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), 3 * n);
    j.columns.resize(static_cast<std::size_t>(3 * n));
    for (int c = 0; c < 3 * n; ++c) j.columns[c] = c;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const int a = rows[k].u;
        const int b = rows[k].v;
        if (b >= n) throw std::invalid_argument("build_full: edge vertex out of range");
        const double ra = p[a].radius;
        const double rb = p[b].radius;
        if (!(ra > 0.0) || !(rb > 0.0)) throw GeometryError("build_full: radii must be positive");
        const Point d = p[a].center - p[b].center;
        const double d2 = std::norm(d);
        const double gx = d.real() / (ra * rb);
        const double gy = d.imag() / (ra * rb);
        const auto row = static_cast<Eigen::Index>(k);
        j.values(row, coord_x(a)) = gx;
        j.values(row, coord_y(a)) = gy;
        j.values(row, coord_x(b)) = -gx;
        j.values(row, coord_y(b)) = -gy;
        j.values(row, coord_r(a)) = (rb * rb - ra * ra - d2) / (2 * ra * ra * rb);
        j.values(row, coord_r(b)) = (ra * ra - rb * rb - d2) / (2 * rb * rb * ra);
    }
    return j;
}

namespace {

JacobianMatrix select(const JacobianMatrix& j, const std::vector<int>& keep_rows,
                      const std::vector<int>& keep_cols, JacobianVariant variant) {
    JacobianMatrix out;
    out.variant = variant;
    out.values.resize(static_cast<Eigen::Index>(keep_rows.size()),
                      static_cast<Eigen::Index>(keep_cols.size()));
    for (std::size_t r = 0; r < keep_rows.size(); ++r) {
        out.row_edges.push_back(j.row_edges[keep_rows[r]]);
        for (std::size_t c = 0; c < keep_cols.size(); ++c) {
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                j.values(keep_rows[r], keep_cols[c]);
        }
    }
    for (int c : keep_cols) out.columns.push_back(j.columns[c]);
    return out;
}

bool is_mark(const std::array<int, 3>& marks, int v) {
    return v == marks[0] || v == marks[1] || v == marks[2];
}

}  // namespace

JacobianMatrix center_pin(const JacobianMatrix& full, const std::array<int, 3>& marks) {
    std::vector<int> rows(full.row_edges.size());
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = static_cast<int>(r);
    std::vector<int> cols;
    for (std::size_t c = 0; c < full.columns.size(); ++c) {
        const int id = full.columns[c];
        if (id % 3 != 2 && is_mark(marks, id / 3)) continue;
        cols.push_back(static_cast<int>(c));
    }
    return select(full, rows, cols, JacobianVariant::CenterPinned);
}

JacobianMatrix pin(const JacobianMatrix& center_pinned, const std::array<int, 3>& marks) {
    std::vector<int> rows;
    std::vector<int> dropped_rows;
    for (std::size_t r = 0; r < center_pinned.row_edges.size(); ++r) {
        const Edge e = center_pinned.row_edges[r];
        (is_mark(marks, e.u) && is_mark(marks, e.v) ? dropped_rows : rows).push_back(static_cast<int>(r));
    }
    std::vector<int> cols;
    std::vector<int> dropped_cols;
    for (std::size_t c = 0; c < center_pinned.columns.size(); ++c) {
        const int id = center_pinned.columns[c];
        (id % 3 == 2 && is_mark(marks, id / 3) ? dropped_cols : cols).push_back(static_cast<int>(c));
    }
    if (dropped_rows.size() != 3 || dropped_cols.size() != 3) {
        throw std::logic_error("pin: marks must span three rows and three radius columns");
    }
    for (int r : dropped_rows) {
        for (int c : cols) {
            if (center_pinned.values(r, c) != 0.0) {
                throw std::logic_error("pin: marked edge row has support outside the marked radii");
            }
        }
    }
    return select(center_pinned, rows, cols, JacobianVariant::Pinned);
}

RankCertificate rank_certificate(const JacobianMatrix& j, double rank_tol) {
    RankCertificate cert;
    if (j.values.size() == 0) return cert;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(j.values);
    const Eigen::VectorXd& s = svd.singularValues();
    cert.sigma_max = s(0);
    cert.sigma_min = s(s.size() - 1);
    for (Eigen::Index k = 0; k < s.size(); ++k) cert.rank += s(k) > rank_tol * cert.sigma_max;
    return cert;
}

namespace {

Eigen::VectorXd checked_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double rank_tol,
                              const char* who) {
    if (a.rows() != a.cols()) throw std::invalid_argument(std::string(who) + ": matrix is not square");
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    // rcond() is unreliable on exactly singular input; check the pivots too.
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double pivot_ratio = pivots.minCoeff() / pivots.maxCoeff();
    const double rcond = std::min(lu.rcond(), pivot_ratio);
    if (!(rcond > rank_tol)) {
        throw SingularJacobian(std::string(who) + ": Jacobian is singular (rcond " +
                               std::to_string(rcond) + "); state left the manifold chart");
    }
    Eigen::VectorXd x = lu.solve(b);
    if (!x.allFinite()) throw SingularJacobian(std::string(who) + ": non-finite solution");
    return x;
}

}  // namespace

Eigen::VectorXd solve(const JacobianMatrix& j, const Eigen::VectorXd& rhs, double rank_tol) {
    return checked_solve(j.values, rhs, rank_tol, "solve");
}

Eigen::VectorXd flip_velocity(const JacobianMatrix& pinned, Edge e_minus, double rank_tol) {
    const int row = pinned.row_of(e_minus);
    if (row < 0) throw std::invalid_argument("flip_velocity: e- is not a row");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(pinned.values.rows());
    rhs(row) = 1.0;
    return checked_solve(pinned.values, rhs, rank_tol, "flip_velocity");
}

Eigen::VectorXd separation_velocity(const JacobianMatrix& center_pinned,
                                    const std::vector<Edge>& added_edges,
                                    const std::vector<double>& rates, double rank_tol) {
    if (added_edges.size() != rates.size()) throw std::invalid_argument("separation_velocity: one rate per edge");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(center_pinned.values.rows());
    for (std::size_t k = 0; k < added_edges.size(); ++k) {
        const int row = center_pinned.row_of(added_edges[k]);
        if (row < 0) throw std::invalid_argument("separation_velocity: added edge is not a row");
        if (!(rates[k] > 0.0)) throw std::invalid_argument("separation_velocity: rates must be positive");
        rhs(row) = rates[k];
    }
    return checked_solve(center_pinned.values, rhs, rank_tol, "separation_velocity");
}

void write_csv(const JacobianMatrix& j, std::ostream& out) {
    out << "edge";
    for (int id : j.columns) out << ',' << "xyr"[id % 3] << id / 3;
    out << '\n';
    out.precision(17);
    for (Eigen::Index r = 0; r < j.values.rows(); ++r) {
        out << j.row_edges[r].u << '-' << j.row_edges[r].v;
        for (Eigen::Index c = 0; c < j.values.cols(); ++c) out << ',' << j.values(r, c);
        out << '\n';
    }
}

}  // namespace katflow
