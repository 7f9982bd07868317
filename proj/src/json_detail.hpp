#pragma once

#include "json.hpp"
#include "sde1d/spec.hpp"

namespace sde1d::detail {

inline nlohmann::json domain_json(const Interval& dom) {
    nlohmann::json j = nlohmann::json::array();
    j.push_back(dom.a);
    if (dom.b_finite())
        j.push_back(dom.b);
    else
        j.push_back("inf");
    return j;
}

inline nlohmann::json spec_json(const DiffusionSpec& s) {
    return nlohmann::json{{"f", s.f.str()},
                          {"g", s.g.str()},
                          {"domain", domain_json(s.domain)},
                          {"interpretation", to_string(s.interpretation)}};
}

}  // namespace sde1d::detail
