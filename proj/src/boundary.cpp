#include "medtest/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "medtest/error.hpp"
#include "medtest/normal.hpp"

namespace medtest {

namespace {

constexpr double kKnotSlack = 1e-12;
constexpr double kTailTolerance = 1e-9;

[[noreturn]] void violation(const std::string& what) {
    throw Error(ErrorCode::invariant_violation, what);
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

GBoundary::GBoundary(std::vector<Knot> knots, double tail, double alpha)
    : knots_(std::move(knots)), tail_(tail), alpha_(alpha) {
    if (knots_.empty()) violation("boundary needs at least one knot");
    if (!(alpha_ > 0.0 && alpha_ < 1.0)) {
        throw Error(ErrorCode::invalid_probability, "boundary level must lie in (0, 1)");
    }
    if (knots_.front().t != 0.0 || knots_.front().g != 0.0) {
        violation("first knot must be (0, 0)");
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        const Knot& k = knots_[i];
        if (!std::isfinite(k.t) || !std::isfinite(k.g)) violation("knots must be finite");
        if (k.g < 0.0) violation("knot ordinates must be non-negative");
        if (k.g > k.t + kKnotSlack) violation("knot ordinate exceeds the 45-degree line");
        if (i > 0) {
            if (!(k.t > knots_[i - 1].t)) violation("knot abscissae must be strictly increasing");
            if (k.g < knots_[i - 1].g) violation("knot ordinates must be non-decreasing");
        }
    }
    if (!std::isfinite(tail_) || tail_ < knots_.back().g) {
        violation("tail must be finite and not below the last knot");
    }
    if (std::abs(tail_ - two_sided_critical_value(alpha_)) > kTailTolerance) {
        violation("tail must equal the two-sided normal critical value of the level");
    }
}

double GBoundary::eval(double t) const noexcept {
    const double x = std::abs(t);
    if (x >= knots_.back().t) return tail_;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](double v, const Knot& k) { return v < k.t; });
    const Knot& hi = *it;
    const Knot& lo = *(it - 1);
    const double w = (x - lo.t) / (hi.t - lo.t);
    return lo.g + w * (hi.g - lo.g);
}

StepBoundary::StepBoundary(std::vector<double> steps, double alpha)
    : steps_(std::move(steps)), alpha_(alpha) {
    if (steps_.empty() || steps_.front() != 0.0) violation("step boundary must start at c_0 = 0");
    for (std::size_t i = 1; i < steps_.size(); ++i) {
        if (!(steps_[i] > steps_[i - 1])) violation("step points must be strictly increasing");
    }
}

double StepBoundary::eval(double t) const noexcept {
    const double x = std::abs(t);
    auto it = std::upper_bound(steps_.begin(), steps_.end(), x);
    return *(it - 1);
}

double StepBoundary::generalized_inverse(double t) const {
    if (!(t >= 0.0)) throw Error(ErrorCode::domain_error, "generalized inverse needs t >= 0");
    if (t >= steps_.back()) return std::numeric_limits<double>::infinity();
    // g(x) > t exactly when x reaches the first step point above t.
    return *std::upper_bound(steps_.begin(), steps_.end(), t);
}

double generalized_inverse(const StepBoundary& boundary, double t) {
    return boundary.generalized_inverse(t);
}

double eval(const Boundary& boundary, double t) noexcept {
    return std::visit([t](const auto& b) { return b.eval(t); }, boundary);
}

double level(const Boundary& boundary) noexcept {
    return std::visit([](const auto& b) { return b.alpha(); }, boundary);
}

std::vector<double> kinks(const Boundary& boundary) {
    return std::visit(overloaded{[](const GBoundary& b) {
                                     std::vector<double> out;
                                     for (const Knot& k : b.knots()) out.push_back(k.t);
                                     return out;
                                 },
                                 [](const StepBoundary& b) { return b.steps(); }},
                      boundary);
}

const GBoundary& published_optimal_boundary() {
    static const GBoundary boundary = [] {
        constexpr double t[] = {0.0,  0.1,  0.11, 0.13, 0.14, 0.15, 1.35, 1.36, 1.37,
                                1.44, 1.45, 2.05, 2.06, 2.07, 2.08, 2.09, 2.1};
        constexpr double g[] = {0.0,      0.1,     0.106723, 0.106723, 0.106724, 0.106724,
                                1.30583,  1.31286, 1.3131,   1.3131,   1.3175,   1.9175,
                                1.9275,   1.9375,  1.9475,   1.9575,   1.95996};
        std::vector<Knot> knots;
        for (std::size_t i = 0; i < std::size(t); ++i) knots.push_back({t[i], g[i]});
        // The printed tail 1.95996 is z_{0.025} rounded; the exact value keeps
        // the limiting null rejection probability at 5%.
        return GBoundary(std::move(knots), two_sided_critical_value(0.05), 0.05);
    }();
    return boundary;
}

GBoundary lr_boundary(double alpha) {
    const double z = two_sided_critical_value(alpha);
    return GBoundary({{0.0, 0.0}, {z, z}}, z, alpha);
}

StepBoundary exact_similar_boundary(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::invalid_probability, "alpha must lie strictly inside (0, 1)");
    }
    const double inv = 1.0 / alpha;
    const double r = std::round(inv);
    if (std::abs(inv - r) > 1e-9 * inv) {
        std::ostringstream msg;
        msg << "no similar boundary exists at alpha = " << alpha << ": 1/alpha is not an integer";
        throw Error(ErrorCode::no_similar_test_exists, msg.str());
    }
    const auto count = static_cast<std::size_t>(r);
    std::vector<double> steps{0.0};
    for (std::size_t j = 1; j + 1 < count; ++j) {
        steps.push_back(std_normal_quantile(0.5 + 0.5 * static_cast<double>(j) / r));
    }
    // Last step is the normal critical value; take it from the accurate tail.
    if (count >= 2) steps.push_back(two_sided_critical_value(1.0 / r));
    return StepBoundary(std::move(steps), alpha);
}

std::string serialize(const Boundary& boundary) {
    nlohmann::json j;
    std::visit(overloaded{[&](const GBoundary& b) {
                              j["alpha"] = b.alpha();
                              j["kind"] = "linear";
                              j["knots"] = nlohmann::json::array();
                              for (const Knot& k : b.knots()) j["knots"].push_back({k.t, k.g});
                              j["tail"] = b.tail();
                          },
                          [&](const StepBoundary& b) {
                              j["alpha"] = b.alpha();
                              j["kind"] = "step";
                              j["knots"] = nlohmann::json::array();
                              for (double c : b.steps()) j["knots"].push_back({c, c});
                              j["tail"] = b.steps().back();
                          }},
               boundary);
    return j.dump(2) + "\n";
}

Boundary deserialize(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::malformed_file, std::string("boundary file is not JSON: ") + e.what());
    }
    auto malformed = [](const std::string& what) {
        return Error(ErrorCode::malformed_file, "boundary file: " + what);
    };
    if (!j.is_object()) throw malformed("top level must be an object");
    for (const char* key : {"alpha", "kind", "knots", "tail"}) {
        if (!j.contains(key)) throw malformed(std::string("missing field `") + key + "`");
    }
    if (!j["alpha"].is_number() || !j["tail"].is_number() || !j["kind"].is_string() ||
        !j["knots"].is_array()) {
        throw malformed("field has the wrong type");
    }
    if (j["knots"].empty()) throw malformed("knot list is empty");
    std::vector<Knot> knots;
    for (const auto& k : j["knots"]) {
        if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
            throw malformed("each knot must be a [t, g] pair of numbers");
        }
        knots.push_back({k[0].get<double>(), k[1].get<double>()});
    }
    const double alpha = j["alpha"].get<double>();
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "linear") return GBoundary(std::move(knots), j["tail"].get<double>(), alpha);
    if (kind == "step") {
        std::vector<double> steps;
        for (const Knot& k : knots) {
            if (k.t != k.g) throw malformed("step knots must satisfy t == g");
            steps.push_back(k.t);
        }
        if (j["tail"].get<double>() != steps.back()) throw malformed("step tail must equal the last step");
        return StepBoundary(std::move(steps), alpha);
    }
    throw malformed("unknown kind `" + kind + "`");
}

void save_boundary(const Boundary& boundary, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::malformed_file, "cannot write " + path.string());
    out << serialize(boundary);
}

Boundary load_boundary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::malformed_file, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

}  // namespace medtest
