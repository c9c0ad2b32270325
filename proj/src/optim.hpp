#pragma once

#include <Eigen/Dense>
#include <functional>

namespace fhfm::detail {

struct BfgsResult {
    Eigen::VectorXd x;
    double fval = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Dense BFGS with backtracking Armijo line search and central-difference
// gradients. Convergence: gradient infinity-norm below grad_tol, or the line
// search/step size collapsing at a numerical optimum.
inline BfgsResult minimize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f,
                                Eigen::VectorXd x0, int max_iter = 500,
                                double grad_tol = 1e-8) {
    const Eigen::Index n = x0.size();
    BfgsResult res;
    res.x = std::move(x0);
    if (n == 0) {
        res.fval = f(res.x);
        res.converged = true;
        return res;
    }

    auto gradient = [&](const Eigen::VectorXd& x, double fx) {
        Eigen::VectorXd g(n);
        Eigen::VectorXd xp = x;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
            xp(i) = x(i) + h;
            const double fp = f(xp);
            xp(i) = x(i) - h;
            const double fm = f(xp);
            xp(i) = x(i);
            g(i) = (fp - fm) / (2.0 * h);
        }
        (void)fx;
        return g;
    };

    double fx = f(res.x);
    Eigen::VectorXd g = gradient(res.x, fx);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);

    for (int iter = 0; iter < max_iter; ++iter) {
        res.iterations = iter;
        if (g.lpNorm<Eigen::Infinity>() < grad_tol) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd dir = -(H * g);
        double slope = g.dot(dir);
        if (!(slope < 0.0)) { // reset a non-descent direction
            H.setIdentity();
            dir = -g;
            slope = g.dot(dir);
        }

        double step = 1.0;
        double fnew = fx;
        Eigen::VectorXd xnew = res.x;
        bool improved = false;
        while (step > 1e-14) {
            xnew = res.x + step * dir;
            fnew = f(xnew);
            if (fnew <= fx + 1e-4 * step * slope) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            // Step size collapsed: no measurable descent remains.
            res.converged = true;
            break;
        }

        Eigen::VectorXd gnew = gradient(xnew, fnew);
        Eigen::VectorXd s = xnew - res.x;
        Eigen::VectorXd y = gnew - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const Eigen::VectorXd Hy = H * y;
            const double yHy = y.dot(Hy);
            H += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
                 (Hy * s.transpose() + s * Hy.transpose()) / sy;
        }
        const double fdrop = fx - fnew;
        res.x = std::move(xnew);
        fx = fnew;
        g = std::move(gnew);
        if (fdrop <= 1e-12 * (std::abs(fx) + 1e-12)) {
            res.converged = true;
            res.iterations = iter + 1;
            break;
        }
    }
    res.fval = fx;
    return res;
}

} // namespace fhfm::detail
