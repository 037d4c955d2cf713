#pragma once

// The pipeline verbs: simulate writes the synthetic session corpus, validate
// screens it for gaze coverage, featurize turns accepted sessions into
// model-ready archives, run trains and evaluates the configured experiments,
// and report rolls the per-experiment reports into one summary.  Each verb
// is idempotent under a fixed config and seed, writes files atomically, and
// returns a process exit code.

#include <iosfwd>
#include <string>

#include "overgaze/cli/config.hpp"

namespace og::cli {

int cmd_simulate(const RunConfig& config, int jobs, bool dry_run, std::ostream& out);
int cmd_validate(const RunConfig& config, int jobs, std::ostream& out);
int cmd_featurize(const RunConfig& config, int jobs, bool dry_run, std::ostream& out);

// `only` restricts to a single named experiment ("" = all).  Failing
// experiments are reported and skipped; the exit code is nonzero iff any
// failed.
int cmd_run(const RunConfig& config, const std::string& only, int jobs, bool dry_run,
            std::ostream& out);
int cmd_report(const RunConfig& config, std::ostream& out);

}  // namespace og::cli
