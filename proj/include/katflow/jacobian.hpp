#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "katflow/disks.hpp"
#include "katflow/triangulation.hpp"

namespace katflow {

inline constexpr double kDefaultRankTol = 1e-9;

class SingularJacobian : public std::runtime_error {
public:
    explicit SingularJacobian(const std::string& what) : std::runtime_error(what) {}
};

enum class JacobianVariant { Full, CenterPinned, Pinned };

/// Coordinate id of x, y or r of disk i.
inline int coord_x(int i) { return 3 * i; }
inline int coord_y(int i) { return 3 * i + 1; }
inline int coord_r(int i) { return 3 * i + 2; }

/// Jacobian of edge inversive distances.  Row k belongs to row_edges[k],
/// column k to the coordinate id columns[k].
struct JacobianMatrix {
    Eigen::MatrixXd values;
    std::vector<Edge> row_edges;
    std::vector<int> columns;
    JacobianVariant variant = JacobianVariant::Full;

    int row_of(Edge e) const;     // -1 if absent
    int column_of(int id) const;  // -1 if absent
};

/// Rows in lexicographic edge order.
JacobianMatrix build_full(const Triangulation& g, const Packing& p);
/// Rows in the given order.
JacobianMatrix build_full(const std::vector<Edge>& rows, const Packing& p);

/// Drops the x, y columns of the marked disks.
JacobianMatrix center_pin(const JacobianMatrix& full, const std::array<int, 3>& marks);

/// Drops the rows of the three marked edges and the marked radius columns.
/// Throws std::logic_error if a marked row touches an unmarked column.
JacobianMatrix pin(const JacobianMatrix& center_pinned, const std::array<int, 3>& marks);

struct RankCertificate {
    int rank = 0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
};

/// Numerical rank: singular values above rank_tol * sigma_max.
RankCertificate rank_certificate(const JacobianMatrix& j, double rank_tol = kDefaultRankTol);

/// Solves the square system j x = rhs; throws SingularJacobian when j is
/// numerically singular.
Eigen::VectorXd solve(const JacobianMatrix& j, const Eigen::VectorXd& rhs,
                      double rank_tol = kDefaultRankTol);

/// Solves J_p v = unit vector on the row of e_minus.
Eigen::VectorXd flip_velocity(const JacobianMatrix& pinned, Edge e_minus,
                              double rank_tol = kDefaultRankTol);

/// Solves J_c v = f' with f' = rates on the added edges, 0 elsewhere.
Eigen::VectorXd separation_velocity(const JacobianMatrix& center_pinned,
                                    const std::vector<Edge>& added_edges,
                                    const std::vector<double>& rates,
                                    double rank_tol = kDefaultRankTol);

/// Header row of column names (x3, y3, r3, ...) then one line per edge.
void write_csv(const JacobianMatrix& j, std::ostream& out);

}  // namespace katflow
