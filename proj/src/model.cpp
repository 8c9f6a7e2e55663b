#include "mixts/model.hpp"

#include <cmath>
#include <sstream>

#include "mixts/error.hpp"

namespace mixts {

ThetaLinear ThetaLinear::zeros(int k, int m) {
    return {Eigen::VectorXd::Zero(k), Eigen::MatrixXd::Zero(k, k), Eigen::MatrixXd::Zero(k, k),
            Eigen::MatrixXd::Zero(k, m)};
}

bool ThetaLinear::b_is_diagonal() const {
    for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j)
            if (i != j && B(i, j) != 0.0) return false;
    return true;
}

bool ThetaLinear::operator==(const ThetaLinear& other) const {
    return d == other.d && A == other.A && B == other.B && Gamma.rows() == other.Gamma.rows() &&
           Gamma.cols() == other.Gamma.cols() && Gamma == other.Gamma;
}

std::string ParamLayout::name(int index) const {
    std::ostringstream out;
    if (index < k_) {
        out << "d." << index + 1;
        return out.str();
    }
    index -= k_;
    if (index < k_ * m_) {
        out << "Gamma." << index % k_ + 1 << "." << index / k_ + 1;
        return out.str();
    }
    index -= k_ * m_;
    if (index < k_ * k_) {
        out << "A." << index % k_ + 1 << "." << index / k_ + 1;
        return out.str();
    }
    index -= k_ * k_;
    out << "B." << index + 1 << "." << index + 1;
    return out.str();
}

int ParamLayout::index_of(const std::string& name) const {
    for (int q = 0; q < size(); ++q)
        if (this->name(q) == name) return q;
    throw InputError("unknown parameter name '" + name + "'");
}

std::vector<int> ParamLayout::equation_indices(int i) const {
    std::vector<int> idx;
    idx.reserve(equation_size());
    idx.push_back(d(i));
    for (int j = 0; j < m_; ++j) idx.push_back(gamma(i, j));
    for (int j = 0; j < k_; ++j) idx.push_back(a(i, j));
    idx.push_back(b(i));
    return idx;
}

Eigen::VectorXd ParamLayout::pack(const ThetaLinear& theta) const {
    Eigen::VectorXd v(size());
    for (int i = 0; i < k_; ++i) {
        v(d(i)) = theta.d(i);
        v(b(i)) = theta.B(i, i);
        for (int j = 0; j < m_; ++j) v(gamma(i, j)) = theta.Gamma(i, j);
        for (int j = 0; j < k_; ++j) v(a(i, j)) = theta.A(i, j);
    }
    return v;
}

ThetaLinear ParamLayout::unpack(const Eigen::VectorXd& v) const {
    if (v.size() != size()) throw InputError("parameter vector has the wrong length");
    ThetaLinear theta = ThetaLinear::zeros(k_, m_);
    for (int i = 0; i < k_; ++i) {
        theta.d(i) = v(d(i));
        theta.B(i, i) = v(b(i));
        for (int j = 0; j < m_; ++j) theta.Gamma(i, j) = v(gamma(i, j));
        for (int j = 0; j < k_; ++j) theta.A(i, j) = v(a(i, j));
    }
    return theta;
}

double ModelSpec::r() const {
    if (k != 2 || R.rows() != 2) throw InputError("scalar copula correlation is defined only for k = 2");
    return R(0, 1);
}

void ModelSpec::set_r(double r) {
    if (k != 2) throw InputError("scalar copula correlation is defined only for k = 2");
    if (!(std::abs(r) < 1.0)) throw InputError("copula correlation must lie in (-1, 1)");
    R = Eigen::MatrixXd::Identity(2, 2);
    R(0, 1) = R(1, 0) = r;
}

void ModelSpec::validate() const {
    if (k < 1) throw InputError("model needs k >= 1");
    if (m < 0) throw InputError("model needs m >= 0");
    if (static_cast<int>(families.size()) != k) throw InputError("one family per coordinate required");
    if (theta.d.size() != k || theta.A.rows() != k || theta.A.cols() != k || theta.B.rows() != k ||
        theta.B.cols() != k || theta.Gamma.rows() != k || theta.Gamma.cols() != m) {
        throw InputError("theta dimensions do not match (k, m)");
    }
    if (!theta.d.allFinite() || !theta.A.allFinite() || !theta.B.allFinite() || !theta.Gamma.allFinite()) {
        throw InputError("theta contains non-finite entries");
    }
    if (R.rows() != k || R.cols() != k) throw InputError("copula correlation must be k x k");
    for (int i = 0; i < k; ++i) {
        if (R(i, i) != 1.0) throw InputError("copula correlation must have unit diagonal");
        for (int j = 0; j < i; ++j) {
            if (R(i, j) != R(j, i)) throw InputError("copula correlation must be symmetric");
            if (!(std::abs(R(i, j)) < 1.0)) throw InputError("copula correlations must lie in (-1, 1)");
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success) throw InputError("copula correlation is not positive definite");
}

void validate_frame(const ModelSpec& spec, const SeriesFrame& frame) {
    if (frame.k() != spec.k) throw InputError("data has " + std::to_string(frame.k()) + " response columns, model expects " + std::to_string(spec.k));
    if (frame.m() != spec.m) throw InputError("data has " + std::to_string(frame.m()) + " covariate columns, model expects " + std::to_string(spec.m));
    if (frame.x.rows() != frame.y.rows() && spec.m > 0) throw InputError("covariate and response lengths differ");
    if (frame.n() < 1) throw InputError("data must contain at least one row");
    for (int t = 0; t < frame.n(); ++t) {
        for (int i = 0; i < spec.k; ++i) {
            if (!in_state_space(spec.families[i], frame.y(t, i))) {
                std::ostringstream msg;
                msg << "row " << t + 1 << ", y" << i + 1 << " = " << frame.y(t, i) << " is not a valid "
                    << family_name(spec.families[i]) << " observation";
                throw InputError(msg.str());
            }
        }
        for (int j = 0; j < spec.m; ++j)
            if (!std::isfinite(frame.x(t, j))) throw InputError("row " + std::to_string(t + 1) + ": non-finite covariate");
    }
}

Eigen::MatrixXd transformed(const std::vector<Family>& families, const Eigen::MatrixXd& y) {
    Eigen::MatrixXd g(y.rows(), y.cols());
    for (Eigen::Index t = 0; t < y.rows(); ++t)
        for (Eigen::Index i = 0; i < y.cols(); ++i) g(t, i) = transform(families[i], y(t, i));
    return g;
}

}  // namespace mixts
