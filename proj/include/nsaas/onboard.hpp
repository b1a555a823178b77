#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nsaas/catalog.hpp"
#include "nsaas/config.hpp"
#include "nsaas/slice_model.hpp"

namespace nsaas {

struct TemplateSelection {
  std::map<Domain, Nsst> per_domain;
};

struct RenderedNst {
  Nst nst;
  std::vector<SlaTarget> sla_targets;
  std::string digest;  // of the canonical NST document
};

struct OnboardResult {
  Scenario scenario = Scenario::kSharedEMBB;
  NormalizedRequirements requirements;
  TemplateSelection selection;
  ResourceDescriptors descriptors;
  RenderedNst rendered;
  std::string request_digest;
};

// True when the template can honour the requirement's delay budget and UE density.
bool feasible(const Nsst& nsst, const NormalizedRequirements& norm);

// Inverse of normalization; attributes filled from defaults are omitted again.
SliceRequest denormalize(const NormalizedRequirements& norm);

// Tenant-facing pipeline: normalize -> match -> translate -> render/validate -> commit.
// Stateless apart from catalog writes.
class Onboarder {
 public:
  Onboarder(const Config& config, Catalog& catalog) : config_(config), catalog_(catalog) {}

  NormalizedRequirements normalize_requirements(const SliceRequest& req) const;

  // Minimal-footprint feasible NSST per domain; ties prefer more shared reuse, then lower id.
  TemplateSelection match_template(const NormalizedRequirements& norm, Scenario scenario) const;

  ResourceDescriptors translate_resources(const TemplateSelection& selection, const NormalizedRequirements& norm,
                                          Scenario scenario) const;

  // Validates schema and policy (all violations reported together), then commits the NST.
  RenderedNst render_and_validate(const ResourceDescriptors& descriptors, const NormalizedRequirements& norm,
                                  const std::string& request_digest, double now = 0);

  OnboardResult onboard(const SliceRequest& req, double now = 0);

 private:
  const Config& config_;
  Catalog& catalog_;
};

}  // namespace nsaas
