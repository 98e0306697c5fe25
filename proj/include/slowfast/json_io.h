#ifndef SLOWFAST_JSON_IO_H_
#define SLOWFAST_JSON_IO_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slowfast/budget_solver.h"
#include "slowfast/frame_analysis.h"
#include "slowfast/grounding.h"
#include "slowfast/gspo.h"
#include "slowfast/manifest.h"
#include "slowfast/packing.h"
#include "slowfast/pipeline_config.h"
#include "slowfast/position_encoding.h"
#include "slowfast/sequence_assembly.h"

// JSON forms of the pipeline types. Output objects have sorted keys and
// floats rounded to 9 significant digits so that equal inputs always
// serialize to identical bytes.
namespace slowfast {

using Json = nlohmann::json;

double round_sig9(double v);

// Two-space indented dump with a trailing newline.
std::string dump_stable(const Json& j);

Json grid_to_json(const PatchGrid& grid);
Json frame_classes_to_json(std::span<const FrameClass> classes,
                           std::span<const double> timestamps);
Json similarity_to_json(std::span<const SimilarityReport> reports);
Json plan_to_json(const BudgetPlan& plan);
Json layout_to_json(const TokenLayout& layout);
Json rope_table_to_json(const RopeIndexTable& table);
Json grounding_item_to_json(const GroundingItem& item);
Json grounding_parse_to_json(const GroundingParse& parse);
Json windows_to_json(std::span<const PackedWindow> windows);
Json assignment_to_json(const WorkerAssignment& assignment);
Json gspo_result_to_json(const GspoResult& result);
Json modality_tokens_to_json(const ModalityTokens& tokens);

// Parsers throw InvalidInputError on malformed or unknown content.
TokenLayout layout_from_json(const Json& j);
GroundingItem grounding_item_from_json(const Json& j);
std::vector<SequenceItem> items_from_json(const Json& j, const CostModel& cost);
GroupRollouts rollouts_from_json(const Json& j);
ModalityTokens modality_tokens_from_json(const Json& j);
PipelineConfig config_from_json(const Json& j);
FrameManifest manifest_from_json(const Json& j, const std::filesystem::path& base_dir);

Json read_json_file(const std::filesystem::path& path);

}  // namespace slowfast

#endif  // SLOWFAST_JSON_IO_H_
