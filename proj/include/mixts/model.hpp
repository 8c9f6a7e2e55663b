#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mixts/marginals.hpp"

namespace mixts {

/// Parameters of the linear latent recursion
///   lambda_t = d + B lambda_{t-1} + A g(Y_{t-1}) + Gamma X_{t-1}.
struct ThetaLinear {
    Eigen::VectorXd d;      // k
    Eigen::MatrixXd A;      // k x k
    Eigen::MatrixXd B;      // k x k, diagonal on the fitting path
    Eigen::MatrixXd Gamma;  // k x m

    static ThetaLinear zeros(int k, int m);

    int k() const { return static_cast<int>(d.size()); }
    int m() const { return static_cast<int>(Gamma.cols()); }
    bool b_is_diagonal() const;

    bool operator==(const ThetaLinear& other) const;
};

/// Index layout of the stacked parameter vector
/// theta = (d', vec(Gamma)', vec(A)', diag(B)')', vec being column-major.
class ParamLayout {
public:
    ParamLayout(int k, int m) : k_(k), m_(m) {}

    int k() const { return k_; }
    int m() const { return m_; }
    int size() const { return k_ + k_ * m_ + k_ * k_ + k_; }

    // Zero-based (i, j) coordinates.
    int d(int i) const { return i; }
    int gamma(int i, int j) const { return k_ + j * k_ + i; }
    int a(int i, int j) const { return k_ + k_ * m_ + j * k_ + i; }
    int b(int i) const { return k_ + k_ * m_ + k_ * k_ + i; }

    /// One-based dotted name, e.g. "A.2.1".
    std::string name(int index) const;
    /// Inverse of name(); throws InputError for unknown names.
    int index_of(const std::string& name) const;

    /// Equation block theta^(i) = (d_i, Gamma(i,.), A(i,.), B(i,i)).
    int equation_size() const { return 2 + m_ + k_; }
    std::vector<int> equation_indices(int i) const;

    Eigen::VectorXd pack(const ThetaLinear& theta) const;
    ThetaLinear unpack(const Eigen::VectorXd& vec) const;

private:
    int k_;
    int m_;
};

/// Full model: marginal families, latent dynamics and copula correlation.
struct ModelSpec {
    int k = 0;
    int m = 0;
    std::vector<Family> families;
    ThetaLinear theta;
    Eigen::MatrixXd R;  // k x k copula correlation

    /// Off-diagonal copula correlation for k = 2.
    double r() const;
    void set_r(double r);

    /// Throws InputError on inconsistent dimensions or an invalid R.
    void validate() const;
};

/// Observed data; row t holds Y_t and X_t.
struct SeriesFrame {
    Eigen::MatrixXd y;  // n x k
    Eigen::MatrixXd x;  // n x m

    int n() const { return static_cast<int>(y.rows()); }
    int k() const { return static_cast<int>(y.cols()); }
    int m() const { return static_cast<int>(x.cols()); }
};

/// Throws InputError if the frame does not match the model's dimensions and
/// state spaces.
void validate_frame(const ModelSpec& spec, const SeriesFrame& frame);

/// Matrix of transformed observations g_i(Y_{t,i}).
Eigen::MatrixXd transformed(const std::vector<Family>& families, const Eigen::MatrixXd& y);

}  // namespace mixts
