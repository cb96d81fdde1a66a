#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "sta/errors.hpp"

namespace sta::pathmodel {

// ------------------------------------------------------------------
// Small numeric helpers

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double two_sided_p(double z) { return 2.0 * (1.0 - normal_cdf(std::fabs(z))); }

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) {  // series
        double sum = 1.0 / a, term = sum, ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-14) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // continued fraction for Q
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-14) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double chi2_cdf(double x, double df) { return gamma_p(df / 2.0, x / 2.0); }

// Noncentral chi-square CDF via the Poisson mixture of central terms.
inline double noncentral_chi2_cdf(double x, double df, double lambda) {
    if (lambda <= 0.0) return chi2_cdf(x, df);
    double sum = 0.0;
    double logl = std::log(lambda / 2.0);
    for (int j = 0; j < 2000; ++j) {
        double logw = -lambda / 2.0 + j * logl - std::lgamma(j + 1.0);
        double w = std::exp(logw);
        sum += w * chi2_cdf(x, df + 2.0 * j);
        if (j > lambda && w < 1e-14) break;
    }
    return std::min(1.0, sum);
}

// ------------------------------------------------------------------
// DAG and data

struct PathDag {
    std::vector<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> edges;  // parent -> child
    std::string exposure;
    std::string outcome;

    int index(const std::string& name) const {
        for (size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i] == name) return int(i);
        return -1;
    }

    std::vector<int> parents(int node) const {
        std::vector<int> out;
        for (const auto& [p, c] : edges)
            if (index(c) == node) out.push_back(index(p));
        std::sort(out.begin(), out.end());
        return out;
    }

    bool has_edge(int from, int to) const {
        for (const auto& [p, c] : edges)
            if (index(p) == from && index(c) == to) return true;
        return false;
    }

    // Kahn topological order; throws CyclicGraph naming a node on a cycle.
    std::vector<int> topo_order() const {
        size_t n = nodes.size();
        std::vector<int> indeg(n, 0);
        for (const auto& [p, c] : edges) {
            if (index(p) < 0) throw ParseError("edge references unknown node " + p);
            if (index(c) < 0) throw ParseError("edge references unknown node " + c);
            indeg[index(c)]++;
        }
        std::vector<int> order;
        std::vector<int> ready;
        for (size_t i = 0; i < n; ++i)
            if (indeg[i] == 0) ready.push_back(int(i));
        while (!ready.empty()) {
            int u = ready.front();
            ready.erase(ready.begin());
            order.push_back(u);
            for (const auto& [p, c] : edges)
                if (index(p) == u && --indeg[index(c)] == 0) ready.push_back(index(c));
        }
        if (order.size() != n)
            for (size_t i = 0; i < n; ++i)
                if (indeg[i] > 0) throw CyclicGraph(nodes[i]);
        return order;
    }
};

struct Dataset {
    std::vector<std::string> names;
    Eigen::MatrixXd values;  // n x p
    Eigen::VectorXd weights;

    int col(const std::string& name) const {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return int(i);
        throw ParseError("dataset has no column " + name);
    }
};

// Normalize weights to mean one.
inline Eigen::VectorXd normalize_weights(const Eigen::VectorXd& w) {
    double s = w.sum();
    if (s <= 0.0) throw BadWeight("path model weights");
    return w * (double(w.size()) / s);
}

inline double wmean(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
    return (w.array() * x.array()).sum() / w.sum();
}

// Weighted covariance with denominator (sum w - 1); weights normalized first.
inline double wcov(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
    double mx = wmean(x, w), my = wmean(y, w);
    double s = (w.array() * (x.array() - mx) * (y.array() - my)).sum();
    return s / (w.sum() - 1.0);
}

// Standardize every column to weighted mean 0, weighted variance 1.
inline Eigen::MatrixXd standardize(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
    Eigen::MatrixXd Z = X;
    for (int j = 0; j < X.cols(); ++j) {
        double m = wmean(X.col(j), w);
        double v = wcov(X.col(j), X.col(j), w);
        if (v <= 0.0) throw SingularDesign("constant variable at column " + std::to_string(j));
        Z.col(j) = (X.col(j).array() - m) / std::sqrt(v);
    }
    return Z;
}

struct WlsFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd se;       // heteroskedasticity-robust
    Eigen::MatrixXd cov;      // robust covariance of beta
    Eigen::VectorXd residuals;
    double r2 = 0.0;
};

// Weighted least squares without intercept (inputs are centered/standardized).
inline WlsFit wls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                  const std::string& equation_name) {
    Eigen::MatrixXd XtW = X.transpose() * w.asDiagonal();
    Eigen::MatrixXd XtWX = XtW * X;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(XtWX);
    if (!lu.isInvertible()) throw SingularDesign(equation_name);
    Eigen::MatrixXd XtWXi = lu.inverse();
    WlsFit fit;
    fit.beta = XtWXi * (XtW * y);
    fit.residuals = y - X * fit.beta;
    // HC0 sandwich with the survey weights folded into the moment conditions.
    Eigen::VectorXd we2 = (w.array() * fit.residuals.array()).square();
    Eigen::MatrixXd meat = X.transpose() * we2.asDiagonal() * X;
    fit.cov = XtWXi * meat * XtWXi;
    fit.se = fit.cov.diagonal().array().sqrt();
    double tss = (w.array() * y.array().square()).sum();
    double rss = (w.array() * fit.residuals.array().square()).sum();
    fit.r2 = tss > 0.0 ? 1.0 - rss / tss : 0.0;
    return fit;
}

// ------------------------------------------------------------------
// VIF pruning

// Iteratively drops the candidate with the largest variance inflation factor
// above the threshold; near-constant columns go first.
inline std::vector<std::string> vif_prune(const std::vector<std::string>& candidates,
                                          const Dataset& data, double threshold = 7.0,
                                          double var_epsilon = 1e-8) {
    Eigen::VectorXd w = normalize_weights(data.weights);
    std::vector<std::string> kept;
    for (const auto& c : candidates) {
        Eigen::VectorXd x = data.values.col(data.col(c));
        if (wcov(x, x, w) >= var_epsilon) kept.push_back(c);
    }
    while (kept.size() >= 2) {
        double worst_vif = 0.0;
        int worst = -1;
        for (size_t j = 0; j < kept.size(); ++j) {
            Eigen::VectorXd y = data.values.col(data.col(kept[j]));
            double my = wmean(y, w), vy = wcov(y, y, w);
            Eigen::VectorXd yc = (y.array() - my) / std::sqrt(vy);
            Eigen::MatrixXd X(y.size(), kept.size() - 1);
            int k = 0;
            for (size_t i = 0; i < kept.size(); ++i) {
                if (i == j) continue;
                Eigen::VectorXd x = data.values.col(data.col(kept[i]));
                double mx = wmean(x, w), vx = wcov(x, x, w);
                X.col(k++) = (x.array() - mx) / std::sqrt(vx);
            }
            Eigen::MatrixXd XtWX = X.transpose() * w.asDiagonal() * X;
            Eigen::FullPivLU<Eigen::MatrixXd> lu(XtWX);
            double vif;
            if (!lu.isInvertible()) {
                vif = std::numeric_limits<double>::infinity();
            } else {
                Eigen::VectorXd beta = lu.inverse() * (X.transpose() * w.asDiagonal() * yc);
                double rss = (w.array() * (yc - X * beta).array().square()).sum();
                double tss = (w.array() * yc.array().square()).sum();
                double r2 = std::min(1.0 - 1e-15, std::max(0.0, 1.0 - rss / tss));
                vif = 1.0 / (1.0 - r2);
            }
            if (vif > worst_vif) {
                worst_vif = vif;
                worst = int(j);
            }
        }
        if (worst < 0 || worst_vif <= threshold) break;
        kept.erase(kept.begin() + worst);
    }
    return kept;
}

// ------------------------------------------------------------------
// d-separation implications

struct IndependenceTest {
    std::string x, y;
    std::vector<std::string> given;
    double partial_correlation = 0.0;
    double p_value = 1.0;
};

// Basis set of testable implications: every non-adjacent ordered pair (x, y)
// must satisfy x _||_ y | pa(x) u pa(y). A saturated DAG yields none.
inline std::vector<IndependenceTest> check_dag(const PathDag& dag, const Dataset& data) {
    auto order = dag.topo_order();
    Eigen::VectorXd w = normalize_weights(data.weights);
    std::vector<IndependenceTest> out;
    for (size_t a = 0; a < order.size(); ++a) {
        for (size_t b = a + 1; b < order.size(); ++b) {
            int u = order[a], v = order[b];
            if (dag.has_edge(u, v) || dag.has_edge(v, u)) continue;
            std::set<int> cond;
            for (int p : dag.parents(u)) cond.insert(p);
            for (int p : dag.parents(v)) cond.insert(p);
            cond.erase(u);
            cond.erase(v);

            IndependenceTest test;
            test.x = dag.nodes[u];
            test.y = dag.nodes[v];
            for (int c : cond) test.given.push_back(dag.nodes[c]);

            Eigen::VectorXd xu = data.values.col(data.col(test.x));
            Eigen::VectorXd xv = data.values.col(data.col(test.y));
            Eigen::VectorXd ru, rv;
            if (cond.empty()) {
                ru = xu.array() - wmean(xu, w);
                rv = xv.array() - wmean(xv, w);
            } else {
                Eigen::MatrixXd C(xu.size(), cond.size() + 1);
                C.col(0).setOnes();
                int k = 1;
                for (int c : cond) C.col(k++) = data.values.col(data.col(dag.nodes[c]));
                Eigen::MatrixXd CtW = C.transpose() * w.asDiagonal();
                Eigen::MatrixXd CtWC = CtW * C;
                Eigen::FullPivLU<Eigen::MatrixXd> lu(CtWC);
                if (!lu.isInvertible()) throw SingularDesign("d-separation conditioning set");
                ru = xu - C * (lu.inverse() * (CtW * xu));
                rv = xv - C * (lu.inverse() * (CtW * xv));
            }
            double r = (w.array() * ru.array() * rv.array()).sum() /
                       std::sqrt((w.array() * ru.array().square()).sum() *
                                 (w.array() * rv.array().square()).sum());
            r = std::max(-0.999999999, std::min(0.999999999, r));
            double n_eff = w.sum();
            double z = 0.5 * std::log((1 + r) / (1 - r)) *
                       std::sqrt(std::max(1.0, n_eff - double(cond.size()) - 3.0));
            test.partial_correlation = r;
            test.p_value = two_sided_p(z);
            out.push_back(std::move(test));
        }
    }
    return out;
}

// ------------------------------------------------------------------
// Structural fit

struct Equation {
    std::string target;
    std::vector<std::string> predictors;
    Eigen::VectorXd beta;
    Eigen::VectorXd se;
    Eigen::MatrixXd cov;
    std::vector<double> p_values;
    double r2 = 0.0;
    double residual_var = 0.0;  // model-consistent psi
};

struct FitIndices {
    double chi2 = 0.0;
    double df = 0.0;
    double chi2_baseline = 0.0;
    double df_baseline = 0.0;
    double cfi = 1.0;
    double tli = 1.0;
    double rmsea = 0.0;
    double rmsea_lo90 = 0.0;
    double rmsea_hi90 = 0.0;
    double srmr = 0.0;
};

struct FitResult {
    PathDag dag;
    std::vector<Equation> equations;
    FitIndices indices;
    size_t n = 0;

    double coefficient(const std::string& from, const std::string& to) const {
        for (const auto& eq : equations) {
            if (eq.target != to) continue;
            for (size_t i = 0; i < eq.predictors.size(); ++i)
                if (eq.predictors[i] == from) return eq.beta[i];
        }
        throw MissingPath(from, to);
    }
};

inline FitResult fit_paths(const PathDag& dag, const Dataset& data) {
    auto order = dag.topo_order();
    const int p = int(dag.nodes.size());
    Eigen::VectorXd w = normalize_weights(data.weights);

    // Assemble the model's variables in dataset column order, standardized.
    Eigen::MatrixXd Z(data.values.rows(), p);
    for (int j = 0; j < p; ++j) Z.col(j) = data.values.col(data.col(dag.nodes[j]));
    Z = standardize(Z, w);

    // Weighted correlation matrix (diagonal exactly one by construction).
    Eigen::MatrixXd S(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) S(i, j) = S(j, i) = wcov(Z.col(i), Z.col(j), w);

    FitResult res;
    res.dag = dag;
    res.n = size_t(Z.rows());

    std::vector<int> exogenous;
    int free_params = 0;
    for (int node : order) {
        auto parents = dag.parents(node);
        if (parents.empty()) {
            exogenous.push_back(node);
            continue;
        }
        Eigen::MatrixXd X(Z.rows(), parents.size());
        for (size_t k = 0; k < parents.size(); ++k) X.col(k) = Z.col(parents[k]);
        WlsFit f = wls(X, Z.col(node), w, dag.nodes[node]);
        Equation eq;
        eq.target = dag.nodes[node];
        for (int pa : parents) eq.predictors.push_back(dag.nodes[pa]);
        eq.beta = f.beta;
        eq.se = f.se;
        eq.cov = f.cov;
        for (int k = 0; k < f.beta.size(); ++k)
            eq.p_values.push_back(two_sided_p(f.beta[k] / std::max(1e-300, f.se[k])));
        eq.r2 = f.r2;
        // Residual variance consistent with the implied covariance algebra.
        Eigen::MatrixXd Spp(parents.size(), parents.size());
        Eigen::VectorXd Spy(parents.size());
        for (size_t a = 0; a < parents.size(); ++a) {
            Spy[a] = S(parents[a], node);
            for (size_t b = 0; b < parents.size(); ++b) Spp(a, b) = S(parents[a], parents[b]);
        }
        eq.residual_var = S(node, node) - (f.beta.transpose() * Spp * f.beta)(0, 0);
        res.equations.push_back(std::move(eq));
        free_params += int(parents.size()) + 1;
    }
    free_params += int(exogenous.size() * (exogenous.size() + 1)) / 2;

    // Model-implied covariance by path tracing in topological order.
    Eigen::MatrixXd Sigma = Eigen::MatrixXd::Zero(p, p);
    for (int a : exogenous)
        for (int b : exogenous) Sigma(a, b) = S(a, b);
    std::vector<bool> done(p, false);
    for (int node : exogenous) done[node] = true;
    for (int node : order) {
        if (done[node]) continue;
        auto parents = dag.parents(node);
        Eigen::VectorXd beta;
        for (const auto& eq : res.equations)
            if (eq.target == dag.nodes[node]) beta = eq.beta;
        double psi = 0.0;
        for (const auto& eq : res.equations)
            if (eq.target == dag.nodes[node]) psi = eq.residual_var;
        for (int z = 0; z < p; ++z) {
            if (!done[z]) continue;
            double c = 0.0;
            for (size_t k = 0; k < parents.size(); ++k) c += beta[k] * Sigma(parents[k], z);
            Sigma(node, z) = Sigma(z, node) = c;
        }
        double v = psi;
        for (size_t a = 0; a < parents.size(); ++a)
            for (size_t b = 0; b < parents.size(); ++b)
                v += beta[a] * beta[b] * Sigma(parents[a], parents[b]);
        Sigma(node, node) = v;
        done[node] = true;
    }

    // Fit indices.
    auto& ix = res.indices;
    double n1 = double(res.n) - 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> luS(Sigma);
    double f_ml = 0.0;
    if (luS.isInvertible()) {
        double logdet_sigma = std::log(std::fabs(Sigma.determinant()));
        double logdet_s = std::log(std::fabs(S.determinant()));
        f_ml = logdet_sigma - logdet_s + (S * luS.inverse()).trace() - p;
        f_ml = std::max(0.0, f_ml);
    }
    ix.chi2 = n1 * f_ml;
    ix.df = double(p * (p + 1) / 2 - free_params);

    // Baseline: mutual independence, unit variances of standardized data.
    double f_b = -std::log(std::fabs(S.determinant())) + S.trace() - p;
    ix.chi2_baseline = n1 * std::max(0.0, f_b);
    ix.df_baseline = double(p * (p - 1) / 2);

    double num = std::max(ix.chi2 - ix.df, 0.0);
    double den = std::max({ix.chi2_baseline - ix.df_baseline, ix.chi2 - ix.df, 0.0});
    ix.cfi = den > 0.0 ? 1.0 - num / den : 1.0;
    if (ix.df > 0.0 && ix.df_baseline > 0.0 && ix.chi2_baseline > 0.0) {
        double rb = ix.chi2_baseline / ix.df_baseline;
        double rm = ix.chi2 / ix.df;
        ix.tli = rb > 1.0 ? (rb - rm) / (rb - 1.0) : 1.0;
        ix.tli = std::min(ix.tli, 1.0);
    } else {
        ix.tli = 1.0;
    }
    if (ix.df > 0.0) {
        ix.rmsea = std::sqrt(std::max(ix.chi2 - ix.df, 0.0) / (ix.df * n1));
        // 90% CI: noncentrality bounds by bisection.
        auto lambda_for = [&](double target) {
            double lo = 0.0, hi = std::max(10.0, 2.0 * ix.chi2);
            while (noncentral_chi2_cdf(ix.chi2, ix.df, hi) > target && hi < 1e7) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                if (noncentral_chi2_cdf(ix.chi2, ix.df, mid) > target) lo = mid;
                else hi = mid;
            }
            return 0.5 * (lo + hi);
        };
        if (chi2_cdf(ix.chi2, ix.df) > 0.95) {
            double l_lo = lambda_for(0.95);
            ix.rmsea_lo90 = std::sqrt(l_lo / (ix.df * n1));
        } else {
            ix.rmsea_lo90 = 0.0;
        }
        if (chi2_cdf(ix.chi2, ix.df) > 0.05) {
            double l_hi = lambda_for(0.05);
            ix.rmsea_hi90 = std::sqrt(l_hi / (ix.df * n1));
        } else {
            ix.rmsea_hi90 = 0.0;
        }
    }

    // SRMR over the full correlation structure (standardized variables).
    double ss = 0.0;
    int terms = 0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) {
            double si = std::sqrt(S(i, i)), sj = std::sqrt(S(j, j));
            double resid = (S(i, j) - Sigma(i, j)) / (si * sj);
            ss += resid * resid;
            ++terms;
        }
    ix.srmr = std::sqrt(ss / terms);
    return res;
}

// ------------------------------------------------------------------
// Effect decomposition

struct PathTerm {
    std::vector<std::string> nodes;  // exposure ... outcome
    double product = 0.0;
};

struct EffectTable {
    double direct = 0.0;
    double indirect = 0.0;
    double total = 0.0;
    double direct_se = 0.0;
    double indirect_se = 0.0;
    double total_se = 0.0;
    std::vector<PathTerm> paths;  // every directed exposure->outcome path
};

namespace detail {

inline void enumerate_paths(const PathDag& dag, int cur, int target,
                            std::vector<int>& stack, std::vector<std::vector<int>>& out) {
    if (cur == target) {
        out.push_back(stack);
        return;
    }
    for (const auto& [p, c] : dag.edges) {
        if (dag.index(p) != cur) continue;
        int nxt = dag.index(c);
        stack.push_back(nxt);
        enumerate_paths(dag, nxt, target, stack, out);
        stack.pop_back();
    }
}

}  // namespace detail

// Generic decomposition for a recursive DAG: every directed exposure->outcome
// path contributes the product of its edge coefficients. Delta-method SEs use
// the per-equation robust covariances; coefficients from different equations
// are treated as independent.
inline EffectTable decompose_effects(const FitResult& fit, const std::string& exposure,
                                     const std::string& outcome) {
    const PathDag& dag = fit.dag;
    int e = dag.index(exposure), o = dag.index(outcome);
    if (e < 0 || o < 0) throw MissingPath(exposure, outcome);
    std::vector<std::vector<int>> paths;
    std::vector<int> stack{e};
    detail::enumerate_paths(dag, e, o, stack, paths);
    if (paths.empty()) throw MissingPath(exposure, outcome);

    EffectTable table;
    // Gradient of each aggregate w.r.t. every edge coefficient.
    std::map<std::pair<std::string, std::string>, double> grad_total, grad_direct, grad_indirect;
    for (const auto& path : paths) {
        PathTerm term;
        term.product = 1.0;
        for (int n : path) term.nodes.push_back(dag.nodes[n]);
        std::vector<std::pair<std::string, std::string>> edges;
        for (size_t i = 0; i + 1 < path.size(); ++i)
            edges.push_back({dag.nodes[path[i]], dag.nodes[path[i + 1]]});
        for (const auto& [from, to] : edges) term.product *= fit.coefficient(from, to);
        bool direct = path.size() == 2;
        if (direct) table.direct += term.product;
        else table.indirect += term.product;
        table.total += term.product;
        for (const auto& edge : edges) {
            double coef = fit.coefficient(edge.first, edge.second);
            double partial = coef != 0.0 ? term.product / coef : 0.0;
            if (coef == 0.0) {
                partial = 1.0;
                for (const auto& other : edges)
                    if (other != edge) partial *= fit.coefficient(other.first, other.second);
            }
            grad_total[edge] += partial;
            (direct ? grad_direct : grad_indirect)[edge] += partial;
        }
        table.paths.push_back(std::move(term));
    }

    auto variance = [&](const std::map<std::pair<std::string, std::string>, double>& grad) {
        double var = 0.0;
        for (const auto& eq : fit.equations) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(eq.beta.size());
            for (size_t i = 0; i < eq.predictors.size(); ++i) {
                auto it = grad.find({eq.predictors[i], eq.target});
                if (it != grad.end()) g[int(i)] = it->second;
            }
            var += (g.transpose() * eq.cov * g)(0, 0);
        }
        return var;
    };
    table.direct_se = std::sqrt(variance(grad_direct));
    table.indirect_se = std::sqrt(variance(grad_indirect));
    table.total_se = std::sqrt(variance(grad_total));
    return table;
}

// Decomposition straight from known standardized coefficients, no data.
inline EffectTable decompose_from_coefficients(
    const PathDag& dag, const std::map<std::pair<std::string, std::string>, double>& coef,
    const std::string& exposure, const std::string& outcome) {
    FitResult fit;
    fit.dag = dag;
    std::map<std::string, Equation> eqs;
    for (const auto& [edge, value] : coef) {
        auto& eq = eqs[edge.second];
        eq.target = edge.second;
        eq.predictors.push_back(edge.first);
    }
    for (auto& [target, eq] : eqs) {
        eq.beta = Eigen::VectorXd::Zero(eq.predictors.size());
        eq.cov = Eigen::MatrixXd::Zero(eq.predictors.size(), eq.predictors.size());
        eq.se = Eigen::VectorXd::Zero(eq.predictors.size());
        for (size_t i = 0; i < eq.predictors.size(); ++i)
            eq.beta[int(i)] = coef.at({eq.predictors[i], target});
        fit.equations.push_back(eq);
    }
    return decompose_effects(fit, exposure, outcome);
}

}  // namespace sta::pathmodel
