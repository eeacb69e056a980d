#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sppa/dataset.hpp"
#include "sppa/lclq.hpp"
#include "sppa/prob.hpp"
#include "sppa/split.hpp"

namespace sppa {

/// Dataset CSV: header `id,x,y,category`, `.` decimal separator, LF or CRLF.
/// Category indices are assigned by first appearance. Errors carry the
/// 1-based line number (the header is line 1).
PointDataset read_dataset_csv(std::string_view text, std::string_view source_name);
std::string write_dataset_csv(const PointDataset& ds);

/// Split CSV: header `id,split`, split in {train,val,test}.
SplitAssignment read_split_csv(std::string_view text, std::string_view source_name,
                               std::uint64_t seed = 0);
std::string write_split_csv(const SplitAssignment& split);

/// Probability table CSV: header `id,p_0,...,p_{C-1}`.
ProbTable read_prob_table_csv(std::string_view text, std::string_view source_name,
                              ProbSource source);
std::string write_prob_table_csv(const ProbTable& table);

/// Global colocation table CSV: `category,v_0,...,v_{C-1},n_contributing`.
std::string write_global_clq_csv(const GlobalClqTable& table,
                                 const std::vector<std::string>& category_names);
GlobalClqTable read_global_clq_csv(std::string_view text, std::string_view source_name);

/// Batch LCLQ vector CSV: `id,v_0,...,v_{C-1},isolated`.
std::string write_lclq_batch_csv(const std::vector<std::int64_t>& ids,
                                 const std::vector<LclqVector>& vectors);

}  // namespace sppa
