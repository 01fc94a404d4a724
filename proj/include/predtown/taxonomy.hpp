#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "predtown/errors.hpp"
#include "predtown/text.hpp"

namespace predtown {

inline constexpr std::size_t kCrimeTypeCount = 34;
inline constexpr const char* kMonthFeatureName = "month";

// Ordered crime-type vocabulary. Exactly 34 canonical labels, one of which
// is the homicide label used for next-month classing.
struct CrimeTaxonomy {
    std::vector<std::string> labels;
    std::size_t homicide_index = 0;

    int index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) return static_cast<int>(i);
        }
        return -1;
    }

    void validate() const {
        if (labels.size() != kCrimeTypeCount)
            throw ConfigError("taxonomy must have exactly 34 labels, got " +
                              std::to_string(labels.size()));
        std::set<std::string> distinct(labels.begin(), labels.end());
        if (distinct.size() != labels.size())
            throw ConfigError("taxonomy labels must be distinct");
        if (homicide_index >= labels.size())
            throw ConfigError("homicide index out of range");
        for (const auto& l : labels) {
            if (l != normalize_text(l))
                throw ConfigError("taxonomy label is not in canonical form: " + l);
        }
    }
};

// Default vocabulary of 34 crime-report types, pre-canonicalized.
inline CrimeTaxonomy default_taxonomy() {
    CrimeTaxonomy t;
    t.labels = {
        "BODILY INJURY",
        "THREAT",
        "ASSAULT",
        "INJURY",
        "THEFT",
        "TRAFFIC INJURY",
        "TRAFFIC DAMAGE",
        "DEFAMATION",
        "HOMICIDE",
        "ABANDONMENT OF THE HOME",
        "VICINAL CONFLICTS",
        "MARITAL CONFLICTS",
        "ESCAPE FROM HOME",
        "RAPE VULNERABLE",
        "OTHER ATYPICAL FACTS",
        "VEHICLE THEFT",
        "EMBEZZLEMENT",
        "DAMAGE",
        "CIVIL DAMAGE",
        "SLANDER",
        "FAMILY CONFLICTS",
        "DRUG TRAFFICKING",
        "AGGRESSION-FIGHT",
        "MISAPPROPRIATION",
        "PHYSICAL AGGRESSION",
        "RECEPTION",
        "RAPE",
        "DISAPPEARANCE OF PEOPLE",
        "ATTEMPTED MURDER",
        "SOUND POLLUTION",
        "OTHER FRAUDS",
        "DISOBEDIENCE",
        "CONTEMPT",
        "DISTURBANCES OF TRANQUILITY",
    };
    t.homicide_index = 8;
    t.validate();
    return t;
}

inline CrimeTaxonomy taxonomy_from_json(const nlohmann::json& j) {
    CrimeTaxonomy t;
    try {
        for (const auto& l : j.at("labels")) t.labels.push_back(normalize_text(l.get<std::string>()));
        const std::string hom = j.contains("homicide_label")
                                    ? normalize_text(j.at("homicide_label").get<std::string>())
                                    : std::string("HOMICIDE");
        const int idx = t.index_of(hom);
        if (idx < 0) throw ConfigError("homicide label not present in taxonomy: " + hom);
        t.homicide_index = static_cast<std::size_t>(idx);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad [taxonomy] config: ") + e.what());
    }
    t.validate();
    return t;
}

inline nlohmann::json taxonomy_to_json(const CrimeTaxonomy& t) {
    return {{"labels", t.labels}, {"homicide_label", t.labels[t.homicide_index]}};
}

} // namespace predtown
