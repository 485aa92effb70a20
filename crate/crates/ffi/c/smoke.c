/* Round-trips every id of a p=5, n=3 tokenizer through the C ABI. */
#include <stdio.h>
#include <string.h>

#include "mlt.h"

static int fail(const char *what, MltStatus st) {
    const char *msg = mlt_last_error();
    fprintf(stderr, "%s: %s (%s)\n", what, mlt_status_name(st), msg ? msg : "");
    return 1;
}

int main(void) {
    MltTokenizer *tok = NULL;
    MltStatus st = mlt_fit(124, 0, 3, 42, &tok);
    if (st != MLT_STATUS_OK) return fail("fit", st);

    char *json = mlt_to_json(tok);
    if (!json || !strstr(json, "\"matrix\": [3,1,3,4,0,2,0,3,0]")) {
        fprintf(stderr, "unexpected config: %s\n", json ? json : "(null)");
        return 1;
    }
    mlt_string_free(json);

    int seen[125] = {0};
    for (uint64_t id = 0; id < 125; id++) {
        uint32_t t[3];
        uint64_t back = 0;
        if ((st = mlt_encode(tok, id, t, 3)) != MLT_STATUS_OK) return fail("encode", st);
        int slot = t[0] + 5 * t[1] + 25 * t[2];
        if (seen[slot]++) {
            fprintf(stderr, "collision at id %llu\n", (unsigned long long)id);
            return 1;
        }
        if ((st = mlt_decode(tok, t, 3, &back)) != MLT_STATUS_OK) return fail("decode", st);
        if (back != id) {
            fprintf(stderr, "id %llu decoded to %llu\n", (unsigned long long)id,
                    (unsigned long long)back);
            return 1;
        }
    }

    uint32_t t[3];
    if (mlt_encode(tok, 125, t, 3) != MLT_STATUS_ID_OUT_OF_RANGE) {
        fprintf(stderr, "id 125 was accepted\n");
        return 1;
    }
    mlt_free(tok);
    puts("ok 125");
    return 0;
}
