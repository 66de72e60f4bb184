#pragma once

#include "gapspectra/model.hpp"
#include "gapspectra/sturm.hpp"

#include <json.hpp>

namespace gapspectra {

/// Potential plus perturbation sign, as used by the CLI config:
///   {"sign": -1, "kind": "power", "params": {"gamma": 3.0, "scale": 1.0}, "shift": 0}
///   {"sign":  1, "kind": "exp",   "params": {"kappa": 1.0}}
///   {"sign":  1, "kind": "table", "table": {"t": [...], "q": [...], "extend_constant": false}}
struct PotentialSpec {
    Sign sign = Sign::minus;
    Potential q = Potential::power(1.0);
};

inline nlohmann::json to_json(const PotentialSpec& p) {
    nlohmann::json j;
    j["sign"] = to_int(p.sign);
    j["shift"] = p.q.shift_k();
    switch (p.q.kind()) {
    case ProfileKind::power:
        j["kind"] = "power";
        j["params"] = {{"gamma", p.q.gamma()}, {"scale", p.q.scale()}};
        break;
    case ProfileKind::exponential:
        j["kind"] = "exp";
        j["params"] = {{"kappa", p.q.kappa()}, {"scale", p.q.scale()}};
        break;
    case ProfileKind::tabulated:
        j["kind"] = "table";
        j["table"] = {{"t", p.q.grid()},
                      {"q", p.q.values()},
                      {"extend_constant", p.q.extend_constant()}};
        break;
    }
    return j;
}

inline PotentialSpec potential_from_json(const nlohmann::json& j) {
    PotentialSpec p;
    p.sign = sign_from_int(j.at("sign").get<int>());
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "power") {
        const auto& prm = j.at("params");
        p.q = Potential::power(prm.at("gamma").get<double>(), prm.value("scale", 1.0));
    } else if (kind == "exp") {
        const auto& prm = j.at("params");
        p.q = Potential::exponential(prm.at("kappa").get<double>(), prm.value("scale", 1.0));
    } else if (kind == "table") {
        const auto& t = j.at("table");
        p.q = Potential::tabulated(t.at("t").get<std::vector<double>>(),
                                   t.at("q").get<std::vector<double>>(),
                                   t.value("extend_constant", false));
    } else {
        throw std::invalid_argument("unknown potential kind: " + kind);
    }
    if (j.contains("shift")) p.q = p.q.shifted(j["shift"].get<int>());
    return p;
}

inline nlohmann::json to_json(const CountResult& r) {
    return nlohmann::json{{"value", r.value},
                          {"truncation_radius", r.truncation_radius},
                          {"ode_tolerance", r.ode_tolerance},
                          {"warnings", r.warnings}};
}

} // namespace gapspectra
