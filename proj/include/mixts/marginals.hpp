#pragma once

#include <string_view>

namespace mixts {

enum class Family { GaussianGarch, PoissonLinear, PoissonLog, BernoulliLogit };

enum class StateSpace { Real, Count, Binary };

enum class LatentDomain { PositiveReal, Real };

struct FamilyTraits {
    StateSpace state_space;
    LatentDomain latent_domain;
    // Lipschitz constant of s -> E g(F_s^{-1}(U)) used in the contraction
    // condition rho(|A| diag(c) + |B|) < 1.
    double lipschitz_c;
};

FamilyTraits traits(Family family);

/// Config-file name: "gaussian_garch", "poisson_linear", "poisson_log", "bernoulli_logit".
std::string_view family_name(Family family);
Family parse_family(std::string_view name);

bool is_discrete(Family family);
bool in_latent_domain(Family family, double s);
bool in_state_space(Family family, double y);

/// Conditional CDF F_s(y). Discrete families accept any integer y
/// (negative values give 0).
double cdf(Family family, double s, double y);

/// Generalized inverse min{y : F_s(y) >= u} for discrete families,
/// sqrt(s) * Phi^{-1}(u) for GaussianGarch.
double quantile(Family family, double s, double u);

/// Observation transform g(y) feeding the latent recursion.
double transform(Family family, double y);

/// Contrast h_y(s) (order 0) and its first/second derivatives in s.
double contrast(Family family, double s, double y, int order);

/// Conditional log density (continuous) or log pmf (discrete).
double log_density(Family family, double s, double y);

/// Mean of the observation under P(.|s).
double conditional_mean(Family family, double s);

/// Hard cap on the Poisson quantile search: mean + 20 sqrt(mean) + 200.
double poisson_search_cap(double mean);

}  // namespace mixts
