#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "spectral/loft.hpp"
#include "spectral/metrics.hpp"
#include "spectral/phantom.hpp"
#include "spectral/preprocess.hpp"

namespace spectral {

using Json = nlohmann::ordered_json;

Json to_json(const LoftBounds& b);
Json to_json(const ThresholdResult& t);
Json to_json(const Component& c);
Json to_json(const LesionReport& r);
Json to_json(const MetricsReport& m);
Json to_json(const PreprocessParams& p, std::size_t image_width);

/// Reads preprocessing overrides on top of `base`. Unknown keys are rejected.
PreprocessParams preprocess_params_from_json(const Json& j, PreprocessParams base = {});

/// "intensity,count" header, then one line per intensity from 0 up to the
/// highest populated bin.
std::string histogram_csv(const IntensityHistogram& h);

/// "dsc,ji,tp,fp,fn,tn" header plus one value line.
std::string metrics_csv(const MetricsReport& m);

/// Plot-sized histogram: at most `max_points` buckets of equal width over
/// [0, max intensity], except that the bucket holding `threshold` is split
/// so the threshold bin is reported on its own.
Json downsample_histogram(const IntensityHistogram& h, std::optional<std::uint16_t> threshold,
                          std::size_t max_points = 2048);

Json to_json(const PhantomSpec& spec);
/// Missing keys keep their defaults; unknown keys and a missing seed are
/// rejected.
PhantomSpec phantom_spec_from_json(const Json& j);

/// image.pgm, body.pgm, dark_class.pgm, lesions.pgm and manifest.json.
void write_phantom_set(const Phantom& phantom, const PhantomSpec& spec, const std::filesystem::path& dir);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace spectral
