; Poll with a bounded retry counter; after a response the caller may
; either process it or drop it and start over.
(system
  (vars (pc Int) (st Int) (k Int))
  (init (and (= pc 0) (= st 0) (= k 0)))
  (trans
    (rule (= pc 0) ((pc 1)))
    (rule (and (= pc 1) (< k 3)) ((k (+ k 1))))
    (rule (= pc 1) ((st 1) (pc 2)))
    (rule (= pc 2) ((pc 3)))
    (rule (= pc 2) ((st 0) (k 0) (pc 0)))
    (rule (= pc 3) ((st 2) (pc 4)))
    (rule (= pc 4) ((st 0) (k 0) (pc 0)))))
