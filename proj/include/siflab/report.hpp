#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "siflab/harness.hpp"

namespace siflab {

inline constexpr const char* kSchema = "sif-lab/1";

const std::vector<std::string>& sweep_columns();  // 14 columns

nlohmann::json to_json(const SifReport& r);
nlohmann::json to_json(const SweepResult& s);
nlohmann::json to_json(const ManufacturedReport& m);

std::string sif_csv_header();
std::string sif_csv_row(const SifReport& r);
std::string sweep_csv(const std::vector<SweepRecord>& rows);
std::string manufactured_csv(const ManufacturedReport& m);

// Writes text to path ("-" = stdout). IoError on failure.
void emit_text(const std::string& text, const std::string& path);
void emit(const SweepResult& s, const std::string& format, const std::string& path);
void emit(const SifReport& r, const std::string& format, const std::string& path);
void emit(const ManufacturedReport& m, const std::string& format, const std::string& path);

}  // namespace siflab
