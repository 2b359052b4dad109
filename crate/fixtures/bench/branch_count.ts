; Choose one of two counters and run it to 5.
(system
  (vars (pc Int) (x Int) (y Int))
  (init (and (= pc 0) (= x 0) (= y 0)))
  (trans
    (rule (= pc 0) ((pc 1)))
    (rule (= pc 0) ((pc 2)))
    (rule (and (= pc 1) (< x 5)) ((x (+ x 1))))
    (rule (and (= pc 1) (>= x 5)) ((pc 3)))
    (rule (and (= pc 2) (< y 5)) ((y (+ y 1))))
    (rule (and (= pc 2) (>= y 5)) ((pc 3)))
    (rule (= pc 3) ())))
