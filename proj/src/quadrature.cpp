#include "fspde/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fspde {

namespace {

// QUADPACK 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEstimate {
    double kronrod;
    double err;
};

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double gauss = fc * kWg[3];
    double kron = fc * kWgk[7];
    for (int i = 0; i < 7; ++i) {
        const double x = h * kXgk[i];
        const double fs = f(c - x) + f(c + x);
        kron += fs * kWgk[i];
        if (i % 2 == 1) gauss += fs * kWg[i / 2];
    }
    kron *= h;
    gauss *= h;
    const double diff = std::abs(kron - gauss);
    // QUADPACK-style sharpened estimate
    const double err = diff > 0.0 ? std::min(diff, std::pow(200.0 * diff, 1.5)) : 0.0;
    return {kron, err};
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol, int max_depth) {
    const double pts[2] = {a, b};
    return integrate_adaptive(f, pts, abs_tol, rel_tol, max_depth);
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, std::span<const double> points,
                              double abs_tol, double rel_tol, int max_depth) {
    if (points.size() < 2) throw std::invalid_argument("integrate_adaptive: need at least 2 points");

    struct Panel {
        double a, b, value, err;
        int depth;
    };

    std::vector<Panel> panels;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i] < points[i + 1])) {
            throw std::invalid_argument("integrate_adaptive: breakpoints must be increasing");
        }
        const auto est = gk15(f, points[i], points[i + 1]);
        panels.push_back({points[i], points[i + 1], est.kronrod, est.err, 0});
        total += est.kronrod;
    }

    auto tolerance = [&](double running_total) {
        return std::max(abs_tol, rel_tol * std::abs(running_total));
    };

    // Repeatedly split the panel with the largest error until the sum of
    // error estimates meets the tolerance.
    while (true) {
        double err_sum = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            err_sum += panels[i].err;
            if (panels[i].err > panels[worst].err) worst = i;
        }
        if (err_sum <= tolerance(total) || panels.size() > 4000) break;
        Panel p = panels[worst];
        if (p.depth >= max_depth) break;
        const double mid = 0.5 * (p.a + p.b);
        const auto left = gk15(f, p.a, mid);
        const auto right = gk15(f, mid, p.b);
        total += left.kronrod + right.kronrod - p.value;
        panels[worst] = {p.a, mid, left.kronrod, left.err, p.depth + 1};
        panels.push_back({mid, p.b, right.kronrod, right.err, p.depth + 1});
    }

    double err_sum = 0.0;
    for (const auto& p : panels) err_sum += p.err;
    return {total, err_sum};
}

}  // namespace fspde
