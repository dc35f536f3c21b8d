#include <stdio.h>
#include <string.h>
#include "semiband.h"

int main(void) {
    const char *q = "{\"norm\":{\"p\":\"1\"},\"matrix\":[[\"1\",\"1/2\"],[\"0\",\"0\"]]}";
    SbOperator *op = NULL;
    if (sb_operator_from_json(q, &op) != SB_STATUS_OK) return 10;
    size_t n = 0;
    bool sbp = true, scp = false, proj = false;
    if (sb_operator_dim(op, &n) != SB_STATUS_OK || n != 2) return 11;
    if (sb_operator_is_sbp(op, &sbp) != SB_STATUS_OK || sbp) return 12;
    if (sb_operator_is_scp(op, &scp) != SB_STATUS_OK || !scp) return 13;
    if (sb_operator_is_projection(op, &proj) != SB_STATUS_OK || !proj) return 14;
    char *json = NULL;
    if (sb_operator_analyze_json(op, 16, &json) != SB_STATUS_OK) return 15;
    if (strstr(json, "\"schema\": 1") == NULL) return 16;
    sb_string_free(json);
    sb_operator_free(op);
    if (sb_operator_from_json("{\"matrix\":[[\"1/0\"]]}", &op) != SB_STATUS_INPUT) return 17;
    const char *msg = sb_last_error_message();
    if (msg == NULL || strstr(msg, "row 1, column 1") == NULL) return 18;
    printf("ok %s\n", sb_version());
    return 0;
}
