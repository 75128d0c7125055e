/* Prints r^2 W(r) for the free Laplacian in three dimensions. */
#include <stdio.h>
#include "hardy_forge.h"

int main(void) {
    HfRadialWeight *w = NULL;
    HfStatus st = hf_radial_weight_new(3, "zero", 1e-6, 1e6, 8001, &w);
    if (st != HF_STATUS_OK) {
        char *msg = hf_last_error();
        fprintf(stderr, "error %d: %s\n", (int)st, msg ? msg : "?");
        hf_string_free(msg);
        return 1;
    }
    double r[] = {1e-3, 1.0, 1e3};
    for (int i = 0; i < 3; i++) {
        double v = 0.0;
        if (hf_radial_weight_eval(w, r[i], &v) != HF_STATUS_OK) return 1;
        printf("%.12f\n", v * r[i] * r[i]);
    }
    st = hf_radial_weight_new(1, "zero", 1e-6, 1e6, 8001, &w);
    printf("%d\n", (int)st);
    hf_radial_weight_free(w);
    return 0;
}
