#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ukfm/models/model_spec.hpp"
#include "ukfm/montecarlo.hpp"

namespace ukfm {

/// Names accepted by make_example, in registration order.
const std::vector<std::string>& registered_examples();

/// Throws InvalidConfig for an unknown name (the message lists the registered ones).
std::unique_ptr<Example> make_example(const std::string& name, const ModelParams& params = {});

}  // namespace ukfm
