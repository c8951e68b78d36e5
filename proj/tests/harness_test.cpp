//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "tzsim/harness.hpp"

#include <random>

#include <gtest/gtest.h>

#include "tzsim/errors.hpp"

namespace tzsim {
namespace {

SimState desk_state(const ScenarioParams& p = ScenarioParams::desk()) {
  return build_sim_state(MemoryMap::default_map(), p);
}

std::vector<OutcomeKind> outcomes(const CampaignReport& r) {
  std::vector<OutcomeKind> out;
  for (const ScenarioResult& s : r.results) out.push_back(s.outcome);
  return out;
}

// --- single scenarios -------------------------------------------------------

TEST(ScenarioTest, HeartBleedLeaksNeighbourBytes) {
  const SimState s = desk_state();
  ScenarioResult r = run_scenario(s, ScenarioId::kHeartBleed, MitigationConfig::off());
  ASSERT_EQ(r.outcome, OutcomeKind::kLeaked);
  EXPECT_EQ(r.leak, (LeakRecord{"HeartbeatNSE", 128, 16, 112}));
  ASSERT_EQ(r.leaked.size(), 112u);
  // Oracle: the over-read bytes are the pool bytes just past the victim.
  const TrustedApp& a2 = s.registry.app("A2");
  EXPECT_EQ(r.leak_source, a2.end());
  EXPECT_EQ(r.leaked, s.map.dump(static_cast<Address>(a2.end()), 112));
}

TEST(ScenarioTest, InvalidTransitionFaults) {
  ScenarioResult r = run_scenario(desk_state(), ScenarioId::kInvStoNsTrans, MitigationConfig::off());
  ASSERT_EQ(r.outcome, OutcomeKind::kFaulted);
  EXPECT_EQ(r.fault->kind(), FaultKind::kSecureFault);
  EXPECT_EQ(r.fault->source(), FaultSource::kSau);
}

TEST(ScenarioTest, InvalidEntryFaultsAtSkippedOffset) {
  const SimState s = desk_state();
  ScenarioResult r = run_scenario(s, ScenarioId::kInvSEntry, MitigationConfig::off());
  ASSERT_EQ(r.outcome, OutcomeKind::kFaulted);
  EXPECT_EQ(r.fault->kind(), FaultKind::kSecureFault);
  EXPECT_EQ(r.fault->at(), s.veneers.find("PrintfNSE")->address + 4);

  ScenarioParams honest;
  honest.skip_offset = 0;
  EXPECT_EQ(run_scenario(desk_state(honest), ScenarioId::kInvSEntry, MitigationConfig::off()).outcome,
            OutcomeKind::kClean);
}

TEST(ScenarioTest, DataAccessFaults) {
  const SimState s = desk_state();
  ScenarioResult r3 = run_scenario(s, ScenarioId::kInvNsDataAccess, MitigationConfig::off());
  ASSERT_EQ(r3.outcome, OutcomeKind::kFaulted);
  EXPECT_EQ(r3.fault->kind(), FaultKind::kSecureFault);
  EXPECT_EQ(r3.fault->at(), kSecAddress);
  ScenarioResult r5 = run_scenario(s, ScenarioId::kInvNsData2Access, MitigationConfig::off());
  ASSERT_EQ(r5.outcome, OutcomeKind::kFaulted);
  EXPECT_EQ(r5.fault->kind(), FaultKind::kDataBusError);
  EXPECT_EQ(r5.fault->source(), FaultSource::kAhb);
  EXPECT_EQ(r5.fault->at(), kNonsecAddress);
}

TEST(ScenarioTest, InputParamsLeakSecretOrAbort) {
  const SimState s = desk_state();
  ScenarioResult r = run_scenario(s, ScenarioId::kInvInputParams, MitigationConfig::off());
  ASSERT_EQ(r.outcome, OutcomeKind::kLeaked);
  EXPECT_EQ(r.leaked, s.secret);
  EXPECT_EQ(r.leak, (LeakRecord{"PrintfNSE", 32, 0, 32}));

  ScenarioParams p;
  p.validates_inputs = true;
  r = run_scenario(desk_state(p), ScenarioId::kInvInputParams, MitigationConfig::off());
  ASSERT_EQ(r.outcome, OutcomeKind::kFaulted);
  EXPECT_EQ(r.fault->kind(), FaultKind::kAchillesHeelAbort);
  EXPECT_EQ(r.fault->detail(), kAchillesHeelMessage);
}

TEST(ScenarioTest, MitigationBlocksBothLeaks) {
  const SimState s = desk_state();
  ScenarioResult hb = run_scenario(s, ScenarioId::kHeartBleed, MitigationConfig::on());
  ASSERT_EQ(hb.outcome, OutcomeKind::kBlocked);
  EXPECT_EQ(hb.blocked->mechanism, "verifier");
  EXPECT_EQ(hb.delta_m(), 0u);
  ScenarioResult pf = run_scenario(s, ScenarioId::kInvInputParams, MitigationConfig::on());
  ASSERT_EQ(pf.outcome, OutcomeKind::kBlocked);
  EXPECT_EQ(pf.blocked->mechanism, "boundary");
}

TEST(ScenarioTest, ProtocolMaxIsAServiceBlock) {
  ScenarioParams p;
  p.claimed_len = 129;
  ScenarioResult r = run_scenario(desk_state(p), ScenarioId::kHeartBleed, MitigationConfig::off());
  ASSERT_EQ(r.outcome, OutcomeKind::kBlocked);
  EXPECT_EQ(r.blocked->key, "service:HeartbeatNSE:ProtocolMaxExceeded");
}

TEST(ScenarioTest, RunScenarioDoesNotTouchInput) {
  const SimState s = desk_state();
  const Bytes before = s.map.dump(s.registry.pool_base(), 184);
  for (ScenarioId id : kAllScenarios) (void)run_scenario(s, id, MitigationConfig::off());
  EXPECT_EQ(s.map.dump(s.registry.pool_base(), 184), before);
}

// --- campaign ---------------------------------------------------------------

TEST(CampaignTest, UnmitigatedCampaign) {
  const SimState s = desk_state();
  CampaignReport r = run_campaign(s, kAllScenarios, MitigationConfig::off());
  EXPECT_EQ(outcomes(r), (std::vector<OutcomeKind>{
                             OutcomeKind::kLeaked, OutcomeKind::kFaulted, OutcomeKind::kFaulted,
                             OutcomeKind::kFaulted, OutcomeKind::kLeaked, OutcomeKind::kFaulted}));
  EXPECT_EQ(r.successful_attacks, 2u);
  EXPECT_EQ(r.max_leak, 112u);
  EXPECT_EQ(r.total_delta, 144u);
  EXPECT_FALSE(r.robust);
  ASSERT_EQ(r.ledger.records().size(), 2u);
  EXPECT_EQ(r.ledger.records()[0].instruction, "x_1:HeartbeatNSE");
  EXPECT_EQ(r.ledger.records()[1].instruction, "x_2:PrintfNSE");
  for (const ScenarioResult& res : r.results) EXPECT_TRUE(matches_expected(s, res, r.mitigation));
}

TEST(CampaignTest, MitigatedCampaign) {
  const SimState s = desk_state();
  CampaignReport r = run_campaign(s, kAllScenarios, MitigationConfig::on());
  EXPECT_EQ(r.successful_attacks, 0u);
  EXPECT_EQ(r.max_leak, 0u);
  EXPECT_EQ(r.total_delta, 0u);
  EXPECT_TRUE(r.robust);
  ASSERT_EQ(r.errors.entries().size(), 2u);
  EXPECT_EQ(r.results[0].blocked->error_id, 1);
  EXPECT_EQ(r.results[4].blocked->error_id, 2);
  for (const ScenarioResult& res : r.results) EXPECT_TRUE(matches_expected(s, res, r.mitigation));
}

TEST(CampaignTest, FaultOnlyCampaignIsRobustWithoutMitigation) {
  const std::vector<ScenarioId> ids = {ScenarioId::kInvStoNsTrans, ScenarioId::kInvSEntry,
                                       ScenarioId::kInvNsDataAccess, ScenarioId::kInvNsData2Access};
  CampaignReport r = run_campaign(desk_state(), ids, MitigationConfig::off());
  EXPECT_TRUE(r.robust);
  EXPECT_TRUE(r.ledger.records().empty());
}

TEST(CampaignTest, ThrowingScenarioBecomesError) {
  ScenarioParams p;
  p.claimed_len = 8;  // shorter than the payload: R < O
  const std::vector<ScenarioId> ids = {ScenarioId::kHeartBleed, ScenarioId::kInvNsDataAccess};
  CampaignReport r = run_campaign(desk_state(p), ids, MitigationConfig::off());
  ASSERT_EQ(r.results[0].outcome, OutcomeKind::kError);
  EXPECT_NE(r.results[0].error.find("shorter"), std::string::npos);
  EXPECT_EQ(r.results[1].outcome, OutcomeKind::kFaulted);
}

TEST(CampaignTest, EmptyListThrows) {
  EXPECT_THROW((void)run_campaign(desk_state(), {}, MitigationConfig::off()),
               std::invalid_argument);
}

TEST(CampaignTest, Deterministic) {
  const SimState s = desk_state();
  for (MitigationConfig m : {MitigationConfig::off(), MitigationConfig::on()}) {
    CampaignReport a = run_campaign(s, kAllScenarios, m);
    for (int i = 0; i < 5; ++i) {
      CampaignReport b = run_campaign(s, kAllScenarios, m);
      EXPECT_EQ(a.results, b.results);
      EXPECT_EQ(a.total_delta, b.total_delta);
    }
  }
  // A different seed changes the bytes but not the shape.
  ScenarioParams p;
  p.seed = 2;
  ScenarioResult x = run_scenario(s, ScenarioId::kHeartBleed, MitigationConfig::off());
  ScenarioResult y = run_scenario(desk_state(p), ScenarioId::kHeartBleed, MitigationConfig::off());
  EXPECT_NE(x.leaked, y.leaked);
  EXPECT_EQ(x.leak, y.leak);
}

// Turning on more mechanisms never raises the leak total.
TEST(CampaignTest, MoreMitigationNeverLeaksMore) {
  const SimState s = desk_state();
  auto total = [&](int mask) {
    MitigationConfig m{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};
    return run_campaign(s, kAllScenarios, m).total_delta;
  };
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      if ((a & b) == a) EXPECT_GE(total(a), total(b)) << a << " vs " << b;
    }
  }
}

// Every scenario under both settings matches the outcome table.
TEST(CampaignTest, OutcomeMatrix) {
  const SimState s = desk_state();
  const ExpectedOutcome want_off[] = {
      {OutcomeKind::kLeaked, {}},
      {OutcomeKind::kFaulted, FaultKind::kSecureFault},
      {OutcomeKind::kFaulted, FaultKind::kSecureFault},
      {OutcomeKind::kFaulted, FaultKind::kSecureFault},
      {OutcomeKind::kLeaked, {}},
      {OutcomeKind::kFaulted, FaultKind::kDataBusError},
  };
  const ExpectedOutcome want_on[] = {
      {OutcomeKind::kBlocked, {}},
      {OutcomeKind::kFaulted, FaultKind::kSecureFault},
      {OutcomeKind::kFaulted, FaultKind::kSecureFault},
      {OutcomeKind::kFaulted, FaultKind::kSecureFault},
      {OutcomeKind::kBlocked, {}},
      {OutcomeKind::kFaulted, FaultKind::kDataBusError},
  };
  for (std::size_t i = 0; i < kAllScenarios.size(); ++i) {
    for (bool on : {false, true}) {
      const MitigationConfig m = on ? MitigationConfig::on() : MitigationConfig::off();
      const ExpectedOutcome& want = on ? want_on[i] : want_off[i];
      ScenarioResult r = run_scenario(s, kAllScenarios[i], m);
      ExpectedOutcome got{r.outcome, r.fault ? std::optional(r.fault->kind()) : std::nullopt};
      EXPECT_EQ(got, want) << to_string(kAllScenarios[i]) << (on ? " on" : " off");
      EXPECT_EQ(expected_outcome(s, kAllScenarios[i], m), want);
    }
  }
}

// --- Δm ledger --------------------------------------------------------------

TEST(LeakLedgerTest, Examples) {
  LeakLedger l;
  EXPECT_EQ(record_leak(l, "hb", 128, 16).delta_m, 112u);
  EXPECT_EQ(record_leak(l, "ok", 16, 16).delta_m, 0u);
  EXPECT_THROW((void)record_leak(l, "bad", 15, 16), AccountingError);
  EXPECT_EQ(l.records().size(), 2u);
  EXPECT_EQ(l.total_delta(), 112u);
}

TEST(LeakLedgerTest, TotalIsSumOfDifferences) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    LeakLedger l;
    std::uint64_t sum = 0;
    const int n = static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      const std::uint64_t o = rng() % 100000;
      const std::uint64_t r = o + rng() % 100000;
      sum += r - o;
      record_leak(l, "x", r, o);
    }
    ASSERT_EQ(l.total_delta(), sum);
  }
}

// --- setup errors -----------------------------------------------------------

TEST(BuildStateTest, ConfigErrors) {
  ScenarioParams p;
  p.pool_region = "ns_ram";
  EXPECT_THROW((void)desk_state(p), ConfigError);
  p = {};
  p.victim = "A9";
  EXPECT_THROW((void)build_sim_state(MemoryMap::default_map(), p,
                                     AppLayout{{"A1", Bytes(4)}}),
               ConfigError);
  p = {};
  EXPECT_THROW((void)build_sim_state(MemoryMap::default_map(), p, AppLayout{{"A2", Bytes(8)}}),
               ConfigError);
  p.neighbor_len = 0x40000;
  EXPECT_THROW((void)desk_state(p), ConfigError);

  MemoryMap no_nsc;
  no_nsc.add_region({"ns_flash", 0x00010000, 0x10000, SecurityAttr::kNonSecure,
                     SecurityAttr::kNonSecure, BusAttr::kNonSecure});
  no_nsc.add_region({"s_flash", 0x10000000, 0x1000, SecurityAttr::kSecure,
                     SecurityAttr::kSecure, BusAttr::kSecure});
  no_nsc.add_region({"s_ram", 0x30000000, 0x1000, SecurityAttr::kSecure,
                     SecurityAttr::kSecure, BusAttr::kSecure});
  EXPECT_THROW((void)build_sim_state(no_nsc, ScenarioParams::desk()), ConfigError);
}

TEST(BuildStateTest, Layout) {
  const SimState s = desk_state();
  const auto apps = s.registry.apps();
  ASSERT_EQ(apps.size(), 4u);
  EXPECT_EQ(apps[0].id, "A1");
  EXPECT_EQ(apps[1].len, 16u);
  EXPECT_EQ(apps[2].len, 56u);
  EXPECT_EQ(s.secret.size(), kSecretLength);
  EXPECT_EQ(s.map.dump(kSecAddress, kSecretLength), s.secret);
  EXPECT_EQ(s.map.peek(kSecAddress + kSecretLength), 0);
  EXPECT_EQ(opaque_payload("A1", 8, 1), opaque_payload("A1", 8, 1));
  EXPECT_NE(opaque_payload("A1", 8, 1), opaque_payload("A3", 8, 1));
  EXPECT_EQ(scenario_from_int(6), std::nullopt);
  EXPECT_EQ(to_string(*scenario_from_int(0)), "FAULT_HEART_BLEED");
}

}  // namespace
}  // namespace tzsim
