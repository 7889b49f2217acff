#pragma once

#include "ddikg/deduction.hpp"

#include <filesystem>

#ifndef DDIKG_DATA_DIR
#error "DDIKG_DATA_DIR must point at the shipped data directory"
#endif

namespace fixtures {

inline std::filesystem::path data_dir() { return DDIKG_DATA_DIR; }

inline std::filesystem::path worked_example_dir() { return data_dir() / "fixtures" / "worked_example"; }

inline ddikg::deduce::ExtensionalDb worked_example() {
    auto dir = worked_example_dir();
    auto drugs = ddikg::deduce::load_drug_table(dir / "drugs.csv");
    ddikg::deduce::ExtensionalDb edb;
    for (auto& d : ddikg::deduce::load_ddis_csv(dir / "ddis.csv", drugs)) edb.add(std::move(d));
    for (auto& t : ddikg::deduce::load_treatments_csv(dir / "treatments.csv", drugs)) edb.add(std::move(t));
    return edb;
}

namespace cui {
inline const char* const hydroxychloroquine = "C0020336";
inline const char* const azithromycin = "C0052796";
inline const char* const montelukast = "C0290681";
inline const char* const lovastatin = "C0024027";
inline const char* const doxycycline = "C0013090";
} // namespace cui

} // namespace fixtures
