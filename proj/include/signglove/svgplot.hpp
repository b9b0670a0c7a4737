#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "signglove/metrics.hpp"
#include "signglove/model.hpp"

namespace signglove {

// Standalone SVG heatmap of a confusion matrix, class symbols on both axes,
// counts printed in the cells.
void write_confusion_svg(const ConfusionMatrix& cm, const std::filesystem::path& path,
                         const std::string& title = "Confusion matrix");

// Train/validation curves from a training history: one SVG with the loss
// panel and the accuracy panel side by side.
void write_training_curves_svg(const TrainHistory& history,
                               const std::filesystem::path& path,
                               const std::string& title = "Training history");

}  // namespace signglove
