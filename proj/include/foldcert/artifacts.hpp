#pragma once

#include <string>

#include "foldcert/cerf.hpp"
#include "foldcert/conley.hpp"
#include "foldcert/verify.hpp"

namespace foldcert {

// Plain-text artifacts, each with a `foldcert/<kind> v1` tag line.  Reruns
// with identical inputs produce byte-identical documents.

std::string write_assumption_report(const AssumptionReport& rep);

std::string write_block_pair(const BlockPair& pair);
BlockPair parse_block_pair(const std::string& text);

std::string write_conley_report(const ConleyIndexReport& rep);
ConleyIndexReport parse_conley_report(const std::string& text);

std::string write_certificate(const Certificate& cert, const ConleyIndexReport& rep,
                              const SimpleBlockReport& simple);
// Extracts (granted, k) from a certificate document.
Certificate parse_certificate(const std::string& text);

std::string write_verification_report(const VerificationReport& rep);

std::string write_branch_table(const EquilibriumBranch& branch);

// Block description input file: `box= <lo> <hi> ...`, `split= <axis> <coord>`,
// optional `point= <x...>`, `resolution= <cells per axis>`, `lambda_resolution= <cells>`.
struct BlockDescription {
    Box box;
    int split_axis = 0;
    double split_coordinate = 0.0;
    Vec interior_point;       // defaults to the split plane center
    std::vector<int> resolution;
    int lambda_resolution = 16;
};
BlockDescription parse_block_description(const std::string& text, int dim);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace foldcert
