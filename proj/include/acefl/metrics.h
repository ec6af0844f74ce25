#ifndef ACEFL_METRICS_H_
#define ACEFL_METRICS_H_

#include <vector>

#include "acefl/round_record.h"

namespace acefl {

// CS_i = sum_t e_i^t / sum_j sum_t e_j^t, indexed by client id 0..N-1.
// Throws PreconditionError if the total is 0.
std::vector<double> ContributionScore(const FlTranscript& transcript,
                                      int num_clients);
std::vector<double> ContributionScore(const std::vector<Contributions>& per_round,
                                      int num_clients);

// Ascending ranks 1..N (1 = lowest CS); equal scores rank the lower id first.
std::vector<int> Ranks(const std::vector<double>& cs);

// R_hat_i - R_i.
int RankGain(const std::vector<double>& cs_free,
             const std::vector<double>& cs_attack, ClientId client);

// Id of the client with the lowest score; ties to the lower id.
ClientId LowestScoreClient(const std::vector<double>& cs);

}  // namespace acefl

#endif  // ACEFL_METRICS_H_
