#pragma once
// Line-oriented decision service.
//
// One JSON object per line in, one JSON object per line out (NDJSON).  Every
// request carries {"v":1,"op":...}; every response carries {"v":1,"ok":...}.
// Ops:
//   open   {policy, header, seed?}            -> {session_id}
//   decide {session, order, costs?}           -> {plan, period_cost, gated}
//   state  {session}                          -> {inventory, cumulative_cost, periods}
//   close  {session}                          -> {summary}
// Failures come back as {"ok":false,"error":code,"message":...} with code in
// {bad_request, no_session, bad_order, bad_costs, internal}.  A failed
// request never mutates session state.

#include <memory>
#include <string>

namespace fulfill {

class Service {
 public:
  Service();
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Handles one request line and returns the response (no trailing newline).
  // Never throws; anything unexpected maps to the "internal" error code.
  // Safe to call from several threads; calls are serialized internally.
  std::string handle_line(const std::string& line);

  int open_sessions() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fulfill
