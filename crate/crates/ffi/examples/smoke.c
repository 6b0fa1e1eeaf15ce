/* Builds an AR-max design through the C interface and prints its metrics. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "dfrc.h"

#define CHECK(call)                                                          \
    do {                                                                     \
        DfrcStatus s_ = (call);                                              \
        if (s_ != DFRC_STATUS_OK) {                                          \
            fprintf(stderr, "%s failed (%d): %s\n", #call, (int)s_,         \
                    dfrc_last_error_message());                              \
            return 1;                                                        \
        }                                                                    \
    } while (0)

int main(void) {
    DfrcChannel *chan = NULL;
    DfrcDesign *design = NULL;
    DfrcParams params;
    DfrcMetrics m;
    double re[200], im[200], powers[10], gains[181];
    char *json = NULL;

    CHECK(dfrc_params_default(&params));
    CHECK(dfrc_channel_random(20, 10, 16, 7, &chan));
    CHECK(dfrc_design_new(chan, &params, DFRC_STRATEGY_ARMAX_TRADEOFF, 0.5, &design));
    CHECK(dfrc_design_metrics(design, &m));
    CHECK(dfrc_design_precoder(design, 3, re, im, 200, powers, 10));
    CHECK(dfrc_design_beampattern(design, 181, NULL, gains));
    CHECK(dfrc_design_to_json(design, &json));

    if (dfrc_design_precoder(design, 3, re, im, 10, NULL, 0) != DFRC_STATUS_BUFFER_TOO_SMALL) {
        fprintf(stderr, "short buffer accepted\n");
        return 1;
    }
    if (!(m.rate <= m.rate_ideal) || m.sqp_iterations < 1 || !isfinite(gains[90])) {
        fprintf(stderr, "unexpected metrics\n");
        return 1;
    }
    printf("dfrc %s: rate %.3f ideal %.3f nmse %.4f sqp %lld json %zu bytes\n", dfrc_version(), m.rate,
           m.rate_ideal, m.nmse, (long long)m.sqp_iterations, strlen(json));

    dfrc_string_free(json);
    dfrc_design_free(design);
    dfrc_channel_free(chan);
    return 0;
}
