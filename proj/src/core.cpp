#include "ghzladder/core.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

namespace ghzladder {

Angle::Angle(double radians) {
    if (!std::isfinite(radians)) {
        throw std::invalid_argument("canonicalize: phase must be finite");
    }
    double v = std::fmod(radians, kTwoPi);
    if (v < 0.0) {
        v += kTwoPi;
    }
    // fmod of a tiny negative value can land exactly on 2*pi after the
    // correction; fold that representative back onto zero.
    if (v >= kTwoPi) {
        v = 0.0;
    }
    value_ = v;
}

Angle canonicalize(double radians) { return Angle(radians); }

double circle_distance(Angle a, Angle b) {
    double d = std::fabs(a.value() - b.value());
    return std::min(d, kTwoPi - d);
}

std::int64_t round_half_up(double x) {
    return static_cast<std::int64_t>(std::floor(x + 0.5));
}

std::string to_string(LastStepMode mode) {
    return mode == LastStepMode::ladder ? "ladder" : "adaptive_mle";
}

LastStepMode last_step_mode_from_string(const std::string& s) {
    if (s == "ladder") return LastStepMode::ladder;
    if (s == "adaptive_mle") return LastStepMode::adaptive_mle;
    throw std::invalid_argument("unknown last_step_mode: " + s);
}

namespace {

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > std::numeric_limits<std::int64_t>::max() / b) {
            throw std::invalid_argument("block size overflows 64 bits");
        }
        r *= b;
    }
    return r;
}

}  // namespace

void SchedulePlan::validate() const {
    if (base < 2 || base > 10) {
        throw std::invalid_argument("plan base must be in [2, 10]");
    }
    if (shrink != base + 1) {
        // The replica-selection geometry tiles the circle exactly only for
        // this pairing; anything else admits 0 or 2 matching candidates.
        throw std::invalid_argument("plan shrink must equal base + 1");
    }
    const int k = static_cast<int>(steps.size());
    if (cap.has_value()) {
        if (*cap < 1) {
            throw std::invalid_argument("plan cap must be positive");
        }
        if (k == 0) {
            throw std::invalid_argument("capped plan needs at least one step");
        }
    }
    for (int j = 1; j <= k; ++j) {
        const StepSpec& s = steps[static_cast<std::size_t>(j - 1)];
        if (s.nu0 < 0 || s.nuplus < 0) {
            throw std::invalid_argument("shot counts must be nonnegative");
        }
        std::int64_t want;
        if (cap.has_value()) {
            std::int64_t d = ipow(base, k - j);
            want = (*cap + d - 1) / d;  // ceil(cap / base^(K-j))
        } else {
            want = ipow(base, j - 1);
        }
        if (s.m != want) {
            throw std::invalid_argument("step " + std::to_string(j) +
                                        " block size must be " + std::to_string(want));
        }
    }
}

std::int64_t total_probes(const SchedulePlan& plan) {
    std::int64_t n = 0;
    for (const StepSpec& s : plan.steps) {
        n += (s.nu0 + s.nuplus) * s.m;
    }
    return n;
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const char* what) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw std::invalid_argument(std::string("unknown field '") + it.key() + "' in " +
                                        what);
        }
    }
}

const json& require(const json& obj, const char* key, const char* what) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw std::invalid_argument(std::string("missing field '") + key + "' in " + what);
    }
    return *it;
}

}  // namespace

std::string plan_to_json(const SchedulePlan& plan) {
    json steps = json::array();
    for (const StepSpec& s : plan.steps) {
        steps.push_back({{"m", s.m}, {"nu0", s.nu0}, {"nuplus", s.nuplus}});
    }
    json doc = {
        {"base", plan.base},
        {"shrink", plan.shrink},
        {"cap", plan.cap.has_value() ? json(*plan.cap) : json(nullptr)},
        {"last_step_mode", to_string(plan.last_step_mode)},
        {"steps", std::move(steps)},
    };
    return doc.dump(2);
}

SchedulePlan plan_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("plan is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw std::invalid_argument("plan document must be a JSON object");
    }
    reject_unknown_keys(doc, {"base", "shrink", "cap", "last_step_mode", "steps"}, "plan");

    SchedulePlan plan;
    plan.base = require(doc, "base", "plan").get<int>();
    plan.shrink = require(doc, "shrink", "plan").get<int>();
    const json& cap = require(doc, "cap", "plan");
    if (!cap.is_null()) {
        plan.cap = cap.get<std::int64_t>();
    }
    plan.last_step_mode =
        last_step_mode_from_string(require(doc, "last_step_mode", "plan").get<std::string>());
    const json& steps = require(doc, "steps", "plan");
    if (!steps.is_array()) {
        throw std::invalid_argument("plan steps must be an array");
    }
    for (const json& s : steps) {
        if (!s.is_object()) {
            throw std::invalid_argument("plan step must be an object");
        }
        reject_unknown_keys(s, {"m", "nu0", "nuplus"}, "step");
        StepSpec spec;
        spec.m = require(s, "m", "step").get<std::int64_t>();
        spec.nu0 = require(s, "nu0", "step").get<std::int64_t>();
        spec.nuplus = require(s, "nuplus", "step").get<std::int64_t>();
        plan.steps.push_back(spec);
    }
    plan.validate();
    return plan;
}

BoundConstants BoundConstants::analytic() {
    // Two one-sided Hoeffding tails per quadrature give A = 4 and
    // C = exp(2 eps^2) at the maximal usable eps = sqrt(6)/8.
    BoundConstants c;
    c.a_const = 4.0;
    c.c_const = std::exp(3.0 / 16.0);
    c.gamma = 16.0 * std::log(2.0);  // 3 / log2(C) in closed form
    c.epsilon = std::sqrt(6.0) / 8.0;
    return c;
}

BoundConstants BoundConstants::calibrated_numeric() {
    BoundConstants c;
    c.a_const = 0.5949;
    c.c_const = 1.6640;
    c.gamma = 4.0835;
    c.epsilon = std::sqrt(6.0) / 8.0;
    return c;
}

BoundConstants BoundConstants::from_base2(double a, double c, double eps) {
    if (!(a >= 0.0) || !(c > 1.0)) {
        throw std::invalid_argument("need A >= 0 and C > 1");
    }
    BoundConstants r;
    r.a_const = a;
    r.c_const = c;
    r.gamma = 3.0 * std::log(2.0) / std::log(c);
    r.epsilon = eps;
    return r;
}

std::string constants_to_json(const BoundConstants& c) {
    json doc = {
        {"a_const", c.a_const},
        {"c_const", c.c_const},
        {"gamma", c.gamma},
        {"epsilon", c.epsilon},
    };
    return doc.dump(2);
}

BoundConstants constants_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("constants blob is not valid JSON: ") + e.what());
    }
    // Accept either a bare constants object or the calibrate output that
    // wraps one under "constants".
    if (doc.is_object() && doc.contains("constants")) {
        doc = doc["constants"];
    }
    if (!doc.is_object()) {
        throw std::invalid_argument("constants document must be a JSON object");
    }
    reject_unknown_keys(doc, {"a_const", "c_const", "gamma", "epsilon"}, "constants");
    BoundConstants c;
    c.a_const = require(doc, "a_const", "constants").get<double>();
    c.c_const = require(doc, "c_const", "constants").get<double>();
    c.gamma = require(doc, "gamma", "constants").get<double>();
    c.epsilon = require(doc, "epsilon", "constants").get<double>();
    return c;
}

}  // namespace ghzladder
