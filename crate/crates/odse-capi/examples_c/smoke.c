/* Minimal consumer of the C API: generate a dataset, train, evaluate.
 *
 * Build (from the workspace root, after `cargo build -p odse-capi --release`):
 *   cc crates/odse-capi/examples_c/smoke.c \
 *      -Icrates/odse-capi/include \
 *      target/release/libodse_capi.a -lpthread -ldl -lm -o smoke
 */
#include <stdio.h>
#include <stdlib.h>

#include "odse.h"

static void check(OdseStatus status, const char *what) {
    if (status != OdseStatus_Ok) {
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)status,
                odse_last_error_message());
        exit(1);
    }
}

int main(void) {
    printf("odse %s\n", odse_version());

    OdseDataset *dataset = NULL;
    check(odse_dataset_generate(2, 5, 0.02, 7, &dataset), "generate");

    size_t train = 0, validation = 0, test = 0, classes = 0;
    check(odse_dataset_counts(dataset, &train, &validation, &test, &classes),
          "counts");
    printf("splits: %zu/%zu/%zu, %zu classes\n", train, validation, test,
           classes);

    const char *config =
        "{\"variant\":\"v2-qre\",\"population_size\":4,"
        "\"max_generations\":3,\"stall_generations\":3,\"seed\":1}";
    OdseModelHandle *model = NULL;
    char *metrics = NULL;
    check(odse_train(dataset, config, &model, &metrics), "train");
    printf("metrics: %s\n", metrics);
    odse_string_free(metrics);

    double accuracy = 0.0;
    check(odse_evaluate(model, dataset, &accuracy, NULL), "evaluate");
    printf("test accuracy: %f\n", accuracy);

    odse_model_free(model);
    odse_dataset_free(dataset);
    return 0;
}
