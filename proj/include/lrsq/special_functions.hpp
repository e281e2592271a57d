#pragma once

namespace lrsq {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Noncentral chi-squared with nu degrees of freedom and noncentrality lambda.
// Evaluated as a Poisson mixture of central chi-squared terms expanded in
// both directions from the dominant index; the density switches to the
// scaled-Bessel asymptotic form when sqrt(lambda * y) is large.
double noncentral_chisq_pdf(double y, double nu, double lambda);
double noncentral_chisq_sf(double y, double nu, double lambda);   // P(Y >= y)
double noncentral_chisq_cdf(double y, double nu, double lambda);  // P(Y <= y)

// E[ Y 1{Y >= y} ] for Y noncentral chi-squared.
double noncentral_chisq_partial_mean(double y, double nu, double lambda);

}  // namespace lrsq
