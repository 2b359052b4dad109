; Wake on a timer, archive with up to three failed attempts, sleep again.
(system
  (vars (pc Int) (wake Int) (fails Int))
  (init (and (= pc 0) (= wake 0) (= fails 0)))
  (trans
    (rule (= pc 0) ((wake *) (pc 1)))
    (rule (and (= pc 1) (> wake 0)) ((pc 2)))
    (rule (and (= pc 1) (<= wake 0)) ((pc 0)))
    (rule (= pc 2) ((fails 0) (pc 3)))
    (rule (= pc 2) ((fails (+ fails 1)) (pc 4)))
    (rule (and (= pc 4) (< fails 3)) ((pc 2)))
    (rule (and (= pc 4) (>= fails 3)) ((fails 0) (pc 3)))
    (rule (= pc 3) ((pc 0)))))
